#pragma once
// CSV / JSON export-import with locked formats:
//   trajectory:  CSV r,u,du           + sidecar JSON {event, problem, tolerances}
//   trace:       CSV r,F,P,rate
//   branch:      CSV a,rho(or inf),u0_check   (+ JSON list of {R,a1,a2})
//   scan:        CSV R,I_R,mass,iterations,converged
//   profile:     JSON {family, params, validation:{r_max, tol}};
//                tabulated data as CSV r,psi,dpsi,ddpsi
//   glued stage: directory {psi.csv, u.csv, meta.json}
// All numbers print with %.17g in the C locale, so identical inputs give
// byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "lem/constructions.hpp"
#include "lem/diagnostics.hpp"
#include "lem/dirichlet.hpp"
#include "lem/model.hpp"
#include "lem/shooting.hpp"
#include "lem/sobolev.hpp"

namespace lem::io {

std::string format_double(double v);

void write_trajectory(const std::filesystem::path& csv, const shooting::Trajectory& t);
void write_trace(const std::filesystem::path& csv, const diagnostics::PohozaevTrace& tr);
void write_branch(const std::filesystem::path& csv, const dirichlet::DirichletBranch& b);
void write_nonuniq(const std::filesystem::path& json,
                   const std::vector<dirichlet::NonUniqTriple>& triples);
void write_scan(const std::filesystem::path& csv, const sobolev::ScanResult& scan);

void save_profile(const std::filesystem::path& json_file, const manifold::Profile& p,
                  double validation_r_max = 1e4, double validation_tol = 1e-6);
manifold::ProfilePtr load_profile(const std::filesystem::path& json_file);

void write_tabulated_csv(const std::filesystem::path& csv, const manifold::Profile& p,
                         const std::vector<double>& grid);
manifold::ProfilePtr read_tabulated_csv(const std::filesystem::path& csv);

void save_glued(const std::filesystem::path& dir, const constructions::GluedArtifact& g);

}  // namespace lem::io
