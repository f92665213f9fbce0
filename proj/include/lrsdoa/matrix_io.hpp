// SPDX-License-Identifier: Apache-2.0
//
// Plain-text complex matrix files (see docs/file-formats.md):
//
//   lrsdoa-matrix 1
//   <rows> <cols>
//   <re> <im> <re> <im> ...      one line per row, %.17g
//
// Lines starting with '#' after the magic line are comments.

#ifndef LRSDOA_MATRIX_IO_HPP_
#define LRSDOA_MATRIX_IO_HPP_

#include "lrsdoa/hermitian.hpp"

#include <iosfwd>
#include <string>

namespace lrsdoa {

void write_matrix(std::ostream& os, const CMatrix& x);
CMatrix read_matrix(std::istream& is);

void save_matrix(const std::string& path, const CMatrix& x);
CMatrix load_matrix(const std::string& path);

}  // namespace lrsdoa

#endif  // LRSDOA_MATRIX_IO_HPP_
