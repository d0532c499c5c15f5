#pragma once

#include <csslm/assemble.hpp>
#include <csslm/connect.hpp>
#include <csslm/dataset.hpp>
#include <csslm/errors.hpp>
#include <csslm/kernel.hpp>
#include <csslm/model.hpp>
#include <csslm/model_io.hpp>
#include <csslm/objective.hpp>
#include <csslm/oracle.hpp>
#include <csslm/qp.hpp>
#include <csslm/regime.hpp>
#include <csslm/sgd.hpp>
#include <csslm/train.hpp>
#include <csslm/verify.hpp>
