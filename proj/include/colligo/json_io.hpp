#pragma once

// JSON encoding of colligations, points and witnesses. Complex numbers are
// [re, im] pairs and matrices are arrays of rows.

#include <string>
#include <vector>

#include "json.hpp"

#include "colligo/coincidence.hpp"

namespace colligo {

using Json = nlohmann::json;

/// Malformed input, located by a JSON pointer into the offending document.
class InputError : public Error {
 public:
  InputError(const std::string& message, std::string path)
      : Error(ErrorCode::InvalidInput, message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Json to_json(const cplx& c);
Json to_json(const MatrixXc& m);
Json to_json(const Colligation& u);
Json to_json(const CoincidenceWitness& w);
Json to_json(const UnitaryCoincidenceWitness& w);

cplx complex_from_json(const Json& j, const std::string& path);
/// Reads a rows x cols matrix; pass -1 to accept any extent. An empty array
/// is a matrix with zero rows and `cols` columns.
MatrixXc matrix_from_json(const Json& j, const std::string& path,
                          Eigen::Index rows = -1, Eigen::Index cols = -1);
Colligation colligation_from_json(const Json& j, const std::string& path = "");
std::vector<Point> points_from_json(const Json& j, int d,
                                    const std::string& path = "");
CoincidenceWitness coincidence_witness_from_json(const Json& j,
                                                 const std::string& path = "");
UnitaryCoincidenceWitness unitary_witness_from_json(const Json& j,
                                                    const std::string& path = "");

/// Parses a file; syntax errors become InputError with the file as path.
Json read_json_file(const std::string& file);

}  // namespace colligo
