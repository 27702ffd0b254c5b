#include "colligo/json_io.hpp"

#include <fstream>

namespace colligo {

namespace {

std::string at(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError("expected an object", path);
  const auto it = j.find(key);
  if (it == j.end()) throw InputError("missing member \"" + key + "\"", at(path, key));
  return *it;
}

Eigen::Index dimension(const Json& j, const std::string& key, const std::string& path,
                       Eigen::Index min_value) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer() || v.get<long long>() < min_value) {
    throw InputError("\"" + key + "\" must be an integer >= " +
                         std::to_string(min_value),
                     at(path, key));
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

double real_from_json(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError("expected a number", path);
  return j.get<double>();
}

}  // namespace

Json to_json(const cplx& c) { return Json::array({c.real(), c.imag()}); }

Json to_json(const MatrixXc& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Colligation& u) {
  Json a = Json::array(), b = Json::array();
  for (int j = 0; j < u.d; ++j) {
    a.push_back(to_json(u.A[j]));
    b.push_back(to_json(u.B[j]));
  }
  return Json{{"d", u.d}, {"n", u.n}, {"p", u.p}, {"q", u.q}, {"A", a},
              {"B", b},   {"C", to_json(u.C)},    {"D", to_json(u.D)}};
}

Json to_json(const CoincidenceWitness& w) {
  return Json{{"alpha", to_json(w.alpha)},
              {"beta", to_json(w.beta)},
              {"residual", w.residual}};
}

Json to_json(const UnitaryCoincidenceWitness& w) {
  return Json{{"Lambda", to_json(w.Lambda)},
              {"Omega1", to_json(w.Omega1)},
              {"Omega2", to_json(w.Omega2)},
              {"pad_dim", w.pad_dim},
              {"padded_side", std::string(to_string(w.padded_side))},
              {"residual", w.residual}};
}

cplx complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) {
    throw InputError("expected a complex number [re, im]", path);
  }
  return {real_from_json(j[0], at(path, 0)), real_from_json(j[1], at(path, 1))};
}

MatrixXc matrix_from_json(const Json& j, const std::string& path,
                          Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw InputError("expected a matrix (array of rows)", path);
  const auto r = static_cast<Eigen::Index>(j.size());
  if (rows >= 0 && r != rows) {
    throw InputError("expected " + std::to_string(rows) + " rows, got " +
                         std::to_string(r),
                     path);
  }
  Eigen::Index c = cols;
  if (r > 0) {
    if (!j[0].is_array()) throw InputError("expected a row array", at(path, 0));
    c = static_cast<Eigen::Index>(j[0].size());
    if (cols >= 0 && c != cols) {
      throw InputError("expected " + std::to_string(cols) + " columns, got " +
                           std::to_string(c),
                       at(path, 0));
    }
  }
  MatrixXc m(r, std::max<Eigen::Index>(c, 0));
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = j[i];
    const std::string row_path = at(path, static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw InputError("ragged matrix row", row_path);
    }
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      m(i, k) = complex_from_json(row[k], at(row_path, static_cast<std::size_t>(k)));
    }
  }
  return m;
}

Colligation colligation_from_json(const Json& j, const std::string& path) {
  Colligation u;
  u.d = static_cast<int>(dimension(j, "d", path, 1));
  u.n = dimension(j, "n", path, 0);
  u.p = dimension(j, "p", path, 0);
  u.q = dimension(j, "q", path, 0);
  for (const char* key : {"A", "B"}) {
    const Json& list = member(j, key, path);
    if (!list.is_array() || static_cast<int>(list.size()) != u.d) {
      throw InputError(std::string("\"") + key + "\" must hold d matrices",
                       at(path, key));
    }
    const Eigen::Index cols = key[0] == 'A' ? u.n : u.p;
    auto& blocks = key[0] == 'A' ? u.A : u.B;
    for (int k = 0; k < u.d; ++k) {
      blocks.push_back(matrix_from_json(list[k], at(at(path, key), k), u.n, cols));
    }
  }
  u.C = matrix_from_json(member(j, "C", path), at(path, "C"), u.q, u.n);
  u.D = matrix_from_json(member(j, "D", path), at(path, "D"), u.q, u.p);
  return u;
}

std::vector<Point> points_from_json(const Json& j, int d, const std::string& path) {
  if (!j.is_array()) throw InputError("expected an array of points", path);
  std::vector<Point> points;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& pt = j[i];
    if (!pt.is_array() || static_cast<int>(pt.size()) != d) {
      throw InputError("each point needs d = " + std::to_string(d) + " coordinates",
                       at(path, i));
    }
    Point z(d);
    for (int k = 0; k < d; ++k) z(k) = complex_from_json(pt[k], at(at(path, i), k));
    points.push_back(std::move(z));
  }
  return points;
}

CoincidenceWitness coincidence_witness_from_json(const Json& j,
                                                 const std::string& path) {
  CoincidenceWitness w;
  w.alpha = matrix_from_json(member(j, "alpha", path), at(path, "alpha"));
  w.beta = matrix_from_json(member(j, "beta", path), at(path, "beta"));
  if (j.contains("residual")) w.residual = real_from_json(j["residual"], at(path, "residual"));
  return w;
}

UnitaryCoincidenceWitness unitary_witness_from_json(const Json& j,
                                                    const std::string& path) {
  UnitaryCoincidenceWitness w;
  w.Lambda = matrix_from_json(member(j, "Lambda", path), at(path, "Lambda"));
  w.Omega1 = matrix_from_json(member(j, "Omega1", path), at(path, "Omega1"));
  w.Omega2 = matrix_from_json(member(j, "Omega2", path), at(path, "Omega2"));
  w.pad_dim = dimension(j, "pad_dim", path, 0);
  const Json& side = member(j, "padded_side", path);
  if (side == "first") {
    w.padded_side = Side::First;
  } else if (side == "second") {
    w.padded_side = Side::Second;
  } else {
    throw InputError("padded_side must be \"first\" or \"second\"",
                     at(path, "padded_side"));
  }
  if (j.contains("residual")) w.residual = real_from_json(j["residual"], at(path, "residual"));
  return w;
}

Json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file, file);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("parse error: ") + e.what(), file);
  }
}

}  // namespace colligo
