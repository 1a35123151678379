#include "nsring/lp.hpp"

#include <json.hpp>

#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nsring {

Rational Term::value() const {
  Rational q{Integer(static_cast<long>(num)), Integer(static_cast<long>(den))};
  q.canonicalize();
  return q;
}

Term make_term(std::uint32_t index, const Rational& value) {
  if (!value.get_num().fits_slong_p() || !value.get_den().fits_slong_p())
    throw std::overflow_error("LP coefficient does not fit the int64 row format");
  return {index, value.get_num().get_si(), value.get_den().get_si()};
}

void RationalLP::validate() const {
  const auto nvars = variables.size();
  auto check_row = [&](const SparseRow& r, const std::string& what) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].index >= nvars) throw std::invalid_argument(what + ": unknown variable index");
      if (r[i].num == 0) throw std::invalid_argument(what + ": explicit zero coefficient");
      if (r[i].den <= 0) throw std::invalid_argument(what + ": non-positive denominator");
      if (i > 0 && r[i - 1].index >= r[i].index)
        throw std::invalid_argument(what + ": terms not strictly sorted");
    }
  };
  check_row(objective, "objective");
  for (std::size_t i = 0; i < rows.size(); ++i) check_row(rows[i].terms, "row " + std::to_string(i));
  if (normalization_row && *normalization_row >= rows.size())
    throw std::invalid_argument("normalization row out of range");
}

namespace {

void add_term(Rational& acc, const Term& t, const Rational& x) {
  if (t.den == 1) {
    acc += x * static_cast<long>(t.num);
  } else {
    acc += x * t.value();
  }
}

}  // namespace

VerifyResult verify_certificate(const RationalLP& lp, const Certificate& cert) {
  VerifyResult res;
  const auto nvars = lp.num_variables();
  if (cert.primal.size() != nvars || cert.dual.size() != lp.num_rows()) {
    res.kind = VerifyResult::Kind::ShapeMismatch;
    res.message = "certificate dimensions do not match the LP";
    return res;
  }
  for (std::size_t j = 0; j < nvars; ++j) {
    if (sgn(cert.primal[j]) < 0) {
      res.kind = VerifyResult::Kind::NegativePrimal;
      res.index = j;
      res.message = "primal entry of column " + std::to_string(j) + " (" + lp.variables[j] +
                    ") is negative: " + to_string(cert.primal[j]);
      return res;
    }
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    Rational lhs;
    for (const auto& t : lp.rows[i].terms) add_term(lhs, t, cert.primal[t.index]);
    if (lhs != lp.rows[i].rhs) {
      res.kind = VerifyResult::Kind::PrimalRowViolated;
      res.index = i;
      res.message = "primal violates row " + std::to_string(i) + ": lhs " + to_string(lhs) +
                    " != rhs " + to_string(lp.rows[i].rhs);
      return res;
    }
  }
  std::vector<Rational> aty(nvars);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    if (sgn(cert.dual[i]) == 0) continue;
    for (const auto& t : lp.rows[i].terms) add_term(aty[t.index], t, cert.dual[i]);
  }
  std::vector<Rational> c(nvars);
  for (const auto& t : lp.objective) c[t.index] = t.value();
  for (std::size_t j = 0; j < nvars; ++j) {
    if (aty[j] < c[j]) {
      res.kind = VerifyResult::Kind::DualColumnViolated;
      res.index = j;
      res.message = "dual violates column " + std::to_string(j) + " (" + lp.variables[j] +
                    "): (A^T y)_j = " + to_string(aty[j]) + " < c_j = " + to_string(c[j]);
      return res;
    }
  }
  Rational cx;
  for (const auto& t : lp.objective) add_term(cx, t, cert.primal[t.index]);
  if (cx != cert.objective) {
    res.kind = VerifyResult::Kind::PrimalObjectiveMismatch;
    res.message = "c.x = " + to_string(cx) + " differs from claimed objective " +
                  to_string(cert.objective);
    return res;
  }
  Rational by;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) by += lp.rows[i].rhs * cert.dual[i];
  if (by != cert.objective) {
    res.kind = VerifyResult::Kind::DualObjectiveMismatch;
    res.message = "b.y = " + to_string(by) + " differs from claimed objective " +
                  to_string(cert.objective);
    return res;
  }
  res.message = "certificate accepted: objective " + to_string(cert.objective);
  return res;
}

namespace {

using json = nlohmann::ordered_json;

json row_to_json(const SparseRow& r) {
  json a = json::array();
  for (const auto& t : r) a.push_back(json::array({t.index, to_string(t.value())}));
  return a;
}

SparseRow row_from_json(const json& a, std::size_t nvars) {
  SparseRow r;
  for (const auto& e : a) {
    const auto idx = e.at(0).get<std::uint64_t>();
    if (idx >= nvars) throw std::invalid_argument("LP json: variable index out of range");
    const Rational q = parse_rational(e.at(1).get<std::string>());
    if (sgn(q) == 0) continue;
    r.push_back(make_term(static_cast<std::uint32_t>(idx), q));
  }
  return r;
}

json dense_to_sparse_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) a.push_back(json::array({i, to_string(v[i])}));
  return a;
}

std::vector<Rational> sparse_json_to_dense(const json& a, std::size_t size, const char* what) {
  std::vector<Rational> v(size);
  for (const auto& e : a) {
    const auto idx = e.at(0).get<std::uint64_t>();
    if (idx >= size) throw std::invalid_argument(std::string("certificate json: ") + what +
                                                 " index out of range");
    v[idx] = parse_rational(e.at(1).get<std::string>());
  }
  return v;
}

}  // namespace

void write_lp_json(std::ostream& out, const RationalLP& lp) {
  json j;
  j["variables"] = lp.variables;
  j["objective"] = row_to_json(lp.objective);
  json rows = json::array();
  for (const auto& r : lp.rows) {
    json jr;
    jr["rhs"] = to_string(r.rhs);
    jr["terms"] = row_to_json(r.terms);
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  if (lp.normalization_row) j["normalization_row"] = *lp.normalization_row;
  out << j.dump() << '\n';
}

RationalLP read_lp_json(std::istream& in) {
  const json j = json::parse(in);
  RationalLP lp;
  lp.variables = j.at("variables").get<std::vector<std::string>>();
  lp.objective = row_from_json(j.at("objective"), lp.variables.size());
  for (const auto& jr : j.at("rows")) {
    Row r;
    r.rhs = parse_rational(jr.at("rhs").get<std::string>());
    r.terms = row_from_json(jr.at("terms"), lp.variables.size());
    lp.rows.push_back(std::move(r));
  }
  if (j.contains("normalization_row")) lp.normalization_row = j.at("normalization_row").get<std::size_t>();
  lp.validate();
  return lp;
}

void write_certificate_json(std::ostream& out, const Certificate& cert) {
  json j;
  j["primal"] = dense_to_sparse_json(cert.primal);
  j["dual"] = dense_to_sparse_json(cert.dual);
  j["objective"] = to_string(cert.objective);
  out << j.dump() << '\n';
}

Certificate read_certificate_json(std::istream& in, const RationalLP& lp) {
  const json j = json::parse(in);
  Certificate cert;
  cert.primal = sparse_json_to_dense(j.at("primal"), lp.num_variables(), "primal");
  cert.dual = sparse_json_to_dense(j.at("dual"), lp.num_rows(), "dual");
  cert.objective = parse_rational(j.at("objective").get<std::string>());
  return cert;
}

}  // namespace nsring
