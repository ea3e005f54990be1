#ifndef DRAWRES_APP_HPP
#define DRAWRES_APP_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "drawres/config.hpp"

namespace drawres {

/// Subcommands in pipeline order.
const std::vector<std::string> &subcommands();

/// Artifact file names, primary and auxiliary, in manifest order.
const std::vector<std::string> &artifact_names();

/// Runs one subcommand (or `pipeline`) against the output directory named by the
/// config, then rewrites manifest.txt. Progress lines go to `log`. Throws Error on
/// missing upstream artifacts or failed self-checks.
void run_subcommand(const std::string &name, const RunConfig &config, std::ostream &log);

} // namespace drawres

#endif // DRAWRES_APP_HPP
