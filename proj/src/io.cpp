#include "qxfer/io.hpp"

#include <cstdio>
#include <fstream>

#include "qxfer/error.hpp"

namespace qxfer {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string shapes_csv(const ShapedPulses& shapes) {
  if (shapes.e.v.size() != shapes.r.v.size() || shapes.e.dt != shapes.r.dt)
    throw ConfigError("pulse shapes must share one grid for export");
  std::string out = "t_ns,re_te,im_te,re_tr,im_tr\r\n";
  for (std::size_t i = 0; i < shapes.e.v.size(); ++i) {
    const double t = shapes.e.t0 + shapes.e.dt * double(i);
    out += fmt_double(t) + "," + fmt_double(shapes.e.v[i].real()) + "," +
           fmt_double(shapes.e.v[i].imag()) + "," + fmt_double(shapes.r.v[i].real()) + "," +
           fmt_double(shapes.r.v[i].imag()) + "\r\n";
  }
  return out;
}

std::string trajectory_csv(const FieldTrajectory& traj) {
  std::string out = "t_ns,re_G,im_G,re_B,im_B,re_A,im_A,re_F,im_F\r\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    out += fmt_double(traj.t[i]);
    for (const Cx* v : {&traj.G[i], &traj.B[i], &traj.A[i], &traj.F[i]})
      out += "," + fmt_double(v->real()) + "," + fmt_double(v->imag());
    out += "\r\n";
  }
  return out;
}

std::string outcome_json(const TransferOutcome& o) {
  std::string out = "{\n";
  out += "  \"eta\": " + fmt_double(o.eta) + ",\n";
  out += "  \"phi_f\": " + fmt_double(o.phi_f) + ",\n";
  out += "  \"residual_emitter\": " + fmt_double(o.residual_emitter) + ",\n";
  out += "  \"received\": " + fmt_double(o.received) + ",\n";
  out += "  \"reflected\": " + fmt_double(o.reflected) + ",\n";
  out += "  \"dissipated\": " + fmt_double(o.dissipated);
  if (!o.warning.empty()) out += ",\n  \"warning\": \"" + json_escape(o.warning) + "\"";
  out += "\n}\n";
  return out;
}

std::string sweep_csv(const SweepTable& table) {
  const bool reflections_style = table.axis_names.size() == 2 &&
                                 table.axis_names[0] == "td_over_tau" &&
                                 table.axis_names[1] == "phi_rad";
  std::string out;
  if (reflections_style) {
    out = "td_over_tau,phi_rad,one_minus_eta\r\n";
    for (const SweepRow& r : table.rows)
      out += fmt_double(r.x[0]) + "," + fmt_double(r.x[1]) + "," + fmt_double(1.0 - r.eta) +
             "\r\n";
    return out;
  }
  for (const std::string& n : table.axis_names) out += n + ",";
  out += "realization,eta,phi_f,error\r\n";
  for (const SweepRow& r : table.rows) {
    for (double x : r.x) out += fmt_double(x) + ",";
    out += std::to_string(r.realization) + "," + fmt_double(r.eta) + "," + fmt_double(r.phi_f) +
           "," + csv_escape(r.error) + "\r\n";
  }
  return out;
}

std::string coupler_csv(const std::vector<CouplerPoint>& points) {
  std::string out = "M_pH,abs_t,arg_t,arg_rin,delta_omega_MHz\r\n";
  const double to_MHz = 1e3 / (2.0 * 3.14159265358979323846);  // rad/ns -> MHz
  for (const CouplerPoint& p : points)
    out += fmt_double(p.M) + "," + fmt_double(std::abs(p.t)) + "," + fmt_double(std::arg(p.t)) +
           "," + fmt_double(std::arg(p.r_in)) + "," + fmt_double(p.delta_omega * to_MHz) + "\r\n";
  return out;
}

std::string density_matrix_json(const DensityMatrix& rho) {
  std::string out = "{\n  \"dim\": " + std::to_string(rho.rows()) + ",\n  \"rows\": [\n";
  for (long i = 0; i < rho.rows(); ++i) {
    out += "    [";
    for (long j = 0; j < rho.cols(); ++j) {
      out += "[" + fmt_double(rho(i, j).real()) + ", " + fmt_double(rho(i, j).imag()) + "]";
      if (j + 1 < rho.cols()) out += ", ";
    }
    out += i + 1 < rho.rows() ? "],\n" : "]\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string fit_json(const FitResult& fit) {
  std::string out = "{\n  \"model\": \"" + json_escape(fit.model) + "\",\n  \"coeff\": [";
  for (std::size_t i = 0; i < fit.coeff.size(); ++i)
    out += (i ? ", " : "") + fmt_double(fit.coeff[i]);
  out += "],\n  \"stderr\": [";
  for (std::size_t i = 0; i < fit.stderr_.size(); ++i)
    out += (i ? ", " : "") + fmt_double(fit.stderr_[i]);
  out += "],\n  \"residual_norm\": " + fmt_double(fit.residual_norm) + "\n}\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f.write(content.data(), long(content.size()));
  if (!f) throw NumericError("failed writing output file '" + path + "'");
}

}  // namespace qxfer
