#include "logio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "errors.hpp"

namespace biovolt {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void hash_double(std::uint64_t& h, double v) {
  h = fnv1a64(&v, sizeof v, h);
}

} // namespace

std::uint64_t tissue_digest(const Tissue& tissue) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_double(h, tissue.t);
  for (const TissueCell& cell : tissue.cells) {
    hash_double(h, cell.state.v_mem);
    for (double c : cell.state.conc_in) hash_double(h, c);
    for (double p : cell.state.perms) hash_double(h, p);
    hash_double(h, cell.state.sig.ca_cam);
    hash_double(h, cell.state.sig.calcineurin_active);
    hash_double(h, cell.state.sig.akt_active);
    hash_double(h, cell.state.sig.ph_in);
    const int tag = static_cast<int>(cell.phenotype.kind);
    h = fnv1a64(&tag, sizeof tag, h);
    h = fnv1a64(&cell.pos.x, sizeof cell.pos.x, h);
    h = fnv1a64(&cell.pos.y, sizeof cell.pos.y, h);
    for (double g : cell.phenotype.gene_expr) hash_double(h, g);
    const int flags = (cell.cleared ? 1 : 0) | (cell.lesion ? 2 : 0);
    h = fnv1a64(&flags, sizeof flags, h);
  }
  for (int s : tissue.site_cell) h = fnv1a64(&s, sizeof s, h);
  return h;
}

EpisodeLogger::EpisodeLogger(std::string scenario_name, std::uint64_t seed,
                             std::uint64_t config_digest, int snapshot_every)
    : snapshot_every_(snapshot_every) {
  std::ostringstream out;
  out << "{\"header\":{\"artifact_version\":\"" << kArtifactVersion << "\",\"config_digest\":\""
      << std::hex << config_digest << std::dec << "\",\"scenario\":\"" << scenario_name
      << "\",\"seed\":" << seed << "}}\n";
  text_ = out.str();
}

void EpisodeLogger::log_step(int step, const std::vector<double>& action,
                             const RewardBreakdown& info, const Tissue& tissue) {
  std::ostringstream out;
  out << "{\"step\":" << step << ",\"action\":[";
  for (std::size_t i = 0; i < action.size(); ++i) {
    out << (i ? "," : "") << format_double(action[i]);
  }
  out << "],\"reward\":" << format_double(info.total) << ",\"reward_breakdown\":{"
      << "\"homeostasis\":" << format_double(info.homeostasis)
      << ",\"signalling\":" << format_double(info.signalling)
      << ",\"efficiency\":" << format_double(info.efficiency)
      << ",\"morph\":" << format_double(info.morph) << ",\"topo\":" << format_double(info.topo)
      << ",\"bioelec\":" << format_double(info.bioelec) << ",\"diff\":" << format_double(info.diff)
      << ",\"prolif\":" << format_double(info.prolif) << ",\"apop\":" << format_double(info.apop)
      << ",\"gene\":" << format_double(info.gene) << ",\"mig\":" << format_double(info.mig)
      << ",\"eff\":" << format_double(info.eff) << "}"
      << ",\"live_count\":" << tissue.live_count() << ",\"tissue_digest\":\"" << std::hex
      << tissue_digest(tissue) << std::dec << "\"}\n";
  if (snapshot_every_ > 0 && step % snapshot_every_ == 0) {
    out << "{\"snapshot\":{\"step\":" << step << ",\"cells\":[";
    bool first = true;
    for (int i = 0; i < static_cast<int>(tissue.cells.size()); ++i) {
      if (!tissue.is_live(i)) continue;
      const TissueCell& c = tissue.cells[i];
      out << (first ? "" : ",") << "{\"x\":" << c.pos.x << ",\"y\":" << c.pos.y
          << ",\"v\":" << format_double(c.state.v_mem) << ",\"phenotype\":\""
          << phenotype_name(c.phenotype.kind) << "\"}";
      first = false;
    }
    out << "]}}\n";
  }
  text_ += out.str();
}

void EpisodeLogger::write(const std::string& path) const { write_text_file(path, text_); }

std::string steps_to_csv(const std::vector<RewardBreakdown>& steps) {
  std::ostringstream out;
  out << "step,total,homeostasis,signalling,efficiency,morph,topo,bioelec,diff,prolif,apop,gene,"
         "mig,eff\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const RewardBreakdown& b = steps[i];
    out << i << "," << format_double(b.total) << "," << format_double(b.homeostasis) << ","
        << format_double(b.signalling) << "," << format_double(b.efficiency) << ","
        << format_double(b.morph) << "," << format_double(b.topo) << ","
        << format_double(b.bioelec) << "," << format_double(b.diff) << ","
        << format_double(b.prolif) << "," << format_double(b.apop) << ","
        << format_double(b.gene) << "," << format_double(b.mig) << "," << format_double(b.eff)
        << "\n";
  }
  return out.str();
}

std::string curve_to_csv(const std::vector<std::pair<int, double>>& curve) {
  std::ostringstream out;
  out << "env_step,eval_return\n";
  for (const auto& [step, ret] : curve) out << step << "," << format_double(ret) << "\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace biovolt
