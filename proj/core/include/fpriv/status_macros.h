// Copyright 2026 The fpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FPRIV_STATUS_MACROS_H_
#define FPRIV_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define FPRIV_CONCAT_INNER_(a, b) a##b
#define FPRIV_CONCAT_(a, b) FPRIV_CONCAT_INNER_(a, b)

#define FPRIV_RETURN_IF_ERROR(expr)        \
  do {                                     \
    ::absl::Status _fpriv_status = (expr); \
    if (!_fpriv_status.ok()) {             \
      return _fpriv_status;                \
    }                                      \
  } while (0)

#define FPRIV_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) {                                   \
    return tmp.status();                             \
  }                                                  \
  lhs = std::move(tmp).value()

#define FPRIV_ASSIGN_OR_RETURN(lhs, expr) \
  FPRIV_ASSIGN_OR_RETURN_IMPL_(FPRIV_CONCAT_(_fpriv_or_, __LINE__), lhs, expr)

#endif  // FPRIV_STATUS_MACROS_H_
