#pragma once

// CSV and JSON writers shared by the command-line tool. Reals are written
// with 17 significant digits so files round-trip and compare byte for byte.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "strichartz/flows.hpp"
#include "strichartz/lambda_table.hpp"
#include "strichartz/linalg.hpp"

namespace strichartz {

inline constexpr int kOutputSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// JSON number that keeps 17 significant digits in the output text.
inline Json exact_number(double v) { return Json::parse(format_double(v)); }

inline Json exact_array(const std::vector<double>& values) {
  Json a = Json::array();
  for (double v : values) a.push_back(exact_number(v));
  return a;
}

inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) out << i << ',' << format_double(s.eigenvalues[i]) << '\n';
}

inline Json spectrum_json(const Spectrum& s) {
  Json j;
  j["size"] = s.eigenvalues.size();
  j["tolerance"] = exact_number(s.tolerance);
  j["counts"] = {{"negative", s.negative}, {"zero", s.zero}, {"positive", s.positive}};
  j["eigenvalues"] = exact_array(s.eigenvalues);
  return j;
}

inline void write_flow_csv(std::ostream& out, const FlowReport& r) {
  out << "t,S,P,H,Q,grad_residual\n";
  for (std::size_t i = 0; i < r.rows(); ++i)
    out << format_double(r.t[i]) << ',' << format_double(r.S[i]) << ',' << format_double(r.P[i]) << ','
        << format_double(r.H[i]) << ',' << format_double(r.Q[i]) << ',' << format_double(r.grad_residual[i]) << '\n';
}

inline Json flow_json(const FlowReport& r) {
  Json j;
  j["steps"] = r.steps;
  j["converged"] = r.converged;
  j["monotone"] = r.monotone;
  j["conserved"] = r.conserved;
  j["drift"] = {{"H", exact_number(r.drift_H)}, {"P", exact_number(r.drift_P)}, {"Q", exact_number(r.drift_Q)}};
  j["t"] = exact_array(r.t);
  j["S"] = exact_array(r.S);
  j["P"] = exact_array(r.P);
  j["H"] = exact_array(r.H);
  j["Q"] = exact_array(r.Q);
  j["grad_residual"] = exact_array(r.grad_residual);
  Json alpha = Json::array();
  for (const Complex& z : r.final_alpha) alpha.push_back({exact_number(z.real()), exact_number(z.imag())});
  j["final_alpha"] = std::move(alpha);
  return j;
}

}  // namespace strichartz
