#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddctl/lti.h"
#include "ddctl/synthesis.h"
#include "ddctl/uncertainty.h"

namespace ddctl {

/// Shortest text that round-trips (17 significant digits).
std::string format_number(double v);

/// Text file of `# key=value` header lines followed by matrix blocks. Each
/// block starts with a `name,rows,cols` line and has one comma-separated
/// line per row.
struct BlockFile {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::pair<std::string, MatrixXd>> blocks;

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  bool has(const std::string& key) const;
  const MatrixXd& block(const std::string& name) const;
  bool has_block(const std::string& name) const;
};

void write_blocks(std::ostream& os, const BlockFile& file);
/// Throws InputError with the offending line number on malformed input.
BlockFile read_blocks(std::istream& is);

void write_dataset(std::ostream& os, const DataSet& data);
DataSet read_dataset(std::istream& is);

void write_ellipsoid(std::ostream& os, const MatrixEllipsoid& ell);
MatrixEllipsoid read_ellipsoid(std::istream& is);

void write_outcome(std::ostream& os, const SynthesisOutcome& out);
SynthesisOutcome read_outcome(std::istream& is);

/// iteration,objective,residual,gamma,lambda,beta,dK,dP,robust_max_eig
void write_trace(std::ostream& os, const std::vector<IterationRecord>& trace);

void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace ddctl
