#pragma once

// Everything except the HTTP adapter (stratcheck/http.hpp), which needs cpp-httplib.

#include "stratcheck/error.hpp"
#include "stratcheck/spec_lang.hpp"
#include "stratcheck/amas.hpp"
#include "stratcheck/model.hpp"
#include "stratcheck/export.hpp"
#include "stratcheck/por.hpp"
#include "stratcheck/verify.hpp"
#include "stratcheck/bisim.hpp"
#include "stratcheck/benchmark.hpp"
#include "stratcheck/service.hpp"
