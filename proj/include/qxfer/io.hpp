#pragma once

#include <string>
#include <vector>

#include "qxfer/coupler.hpp"
#include "qxfer/dynamics.hpp"
#include "qxfer/lab.hpp"
#include "qxfer/quantum.hpp"

namespace qxfer {

// shortest round-trip formatting (%.17g), RFC-4180 CSV, '.' decimal separator
std::string fmt_double(double v);

std::string shapes_csv(const ShapedPulses& shapes);
std::string trajectory_csv(const FieldTrajectory& traj);
std::string outcome_json(const TransferOutcome& outcome);
std::string sweep_csv(const SweepTable& table);
std::string coupler_csv(const std::vector<CouplerPoint>& points);
std::string density_matrix_json(const DensityMatrix& rho);
std::string fit_json(const FitResult& fit);

// Writes the fully assembled content in one call; outputs are never partial.
void write_file(const std::string& path, const std::string& content);

}  // namespace qxfer
