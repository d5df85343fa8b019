// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <illposed/attacks.hpp>
#include <illposed/common.hpp>
#include <illposed/encoding.hpp>
#include <illposed/error_sampler.hpp>
#include <illposed/function_space.hpp>
#include <illposed/hso_operator.hpp>
#include <illposed/hybrid_pke.hpp>
#include <illposed/kem.hpp>
#include <illposed/lwe_bridge.hpp>
#include <illposed/symmetric_scheme.hpp>
#include <illposed/xof.hpp>
