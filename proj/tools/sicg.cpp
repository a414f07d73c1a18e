#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sicg/clifford.hpp"
#include "sicg/errors.hpp"
#include "sicg/fiducial.hpp"
#include "sicg/galois.hpp"
#include "sicg/parallel.hpp"
#include "sicg/reference.hpp"
#include "sicg/report.hpp"
#include "sicg/search.hpp"

using namespace sicg;

namespace {

// Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct Globals {
  unsigned digits = 40;
  std::string tol;
  int threads = 0;
  std::string data_dir;
};

Real tolerance(const Globals& g) { return g.tol.empty() ? structural_tolerance() : parse_real(g.tol); }

int line(bool pass, const std::string& what) {
  std::cout << "[" << (pass ? "PASS" : "FAIL") << "] " << what << "\n";
  return pass ? kOk : kFailed;
}

FiducialProjector load(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FormatError("no such file: " + path);
  return read_fiducial(path).projector;
}

const OrbitRecord* record_for(const std::vector<OrbitRecord>& records, const std::string& label) {
  return label.empty() ? nullptr : find_orbit(records, label);
}

int cmd_verify(const Globals& g, const std::string& file) {
  auto fp = load(file);
  auto r = verify_sic(fp, tolerance(g));
  std::cout << "d " << fp.d << "\n"
            << "max_overlap_deviation " << to_fixed(r.max_deviation, 3) << "\n"
            << "frame_deviation " << to_fixed(r.frame_deviation, 3) << "\n";
  return line(r.pass, "sic");
}

int cmd_overlaps(const std::string& file, int shown) {
  auto fp = load(file);
  auto chi = overlaps(fp);
  for (long a = 0; a < fp.d; ++a)
    for (long b = 0; b < fp.d; ++b) {
      const Complex& c = chi.at({a, b});
      std::cout << a << " " << b << " " << to_fixed(c.re, shown) << " " << to_fixed(c.im, shown) << "\n";
    }
  return kOk;
}

int cmd_stabilize(const Globals& g, const std::string& file, bool verify_list, const std::string& orbit) {
  auto fp = load(file);
  StabilizerOptions so;
  so.threads = g.threads;
  if (verify_list) {
    auto records = load_orbit_records(data_dir() + "/orbits/records.txt");
    const OrbitRecord* rec = record_for(records, orbit.empty() ? fp.orbit : orbit);
    if (!rec) throw FormatError("--verify-list needs a known orbit label (file header or --orbit)");
    so.mode = StabilizerMode::verify_list;
    so.candidates = generate(dbar_of(rec->d), {rec->f0}).elements;
  }
  StabilizerReport st;
  try {
    st = stabilizer(fp, so);
  } catch (const SearchBudgetExceeded& e) {
    std::cerr << e.what() << "\n(the box generators act in the box frame; a fiducial in another frame needs --exhaustive)\n";
    return kFailed;
  }
  std::cout << "s_tilde " << st.s_tilde.order() << "\n"
            << "s_bar " << st.s_bar.order() << (st.s_bar.is_abelian() ? "" : " non-abelian") << "\n"
            << "elements " << st.elements.size() << "\n"
            << "type " << to_string(st.type) << "\n"
            << "simple " << (is_simple(st) ? "yes" : "no") << "\n";
  if (st.canonical_order3) std::cout << "canonical_order3 " << st.canonical_order3->str() << "\n";
  return kOk;
}

int cmd_centralize(const Globals& g, const std::string& target) {
  std::string label;
  FiducialProjector fp;
  if (std::filesystem::exists(target)) {
    fp = load(target);
    label = fp.orbit;
  } else {
    ReportOptions ro;
    ro.threads = g.threads;
    fp = orbit_fiducial(target, ro);
    label = target;
  }
  StabilizerOptions so;
  so.threads = g.threads;
  auto st = stabilizer(fp, so);
  const long n = dbar_of(fp.d);
  auto c = centralizer(st.s_bar, n, kDefaultGroupCap, g.threads);
  auto nn = normalizer(st.s_bar, n, kDefaultGroupCap, g.threads);
  std::cout << "s_bar " << st.s_bar.order() << "\n"
            << "centralizer " << c.order() << "\n"
            << "normalizer " << nn.order() << "\n";
  if (st.s_bar.is_abelian()) std::cout << "quotient " << quotient_invariants(c, st.s_bar).str() << "\n";
  auto records = load_orbit_records(data_dir() + "/orbits/records.txt");
  if (const OrbitRecord* rec = record_for(records, label))
    return line(c.order() == rec->centralizer_order, "centralizer order " + std::to_string(c.order()) + " vs box " + label + " " +
                                                         std::to_string(rec->centralizer_order));
  return kOk;
}

void print_elements(const std::vector<GaloisElement>& v) {
  for (const auto& e : v) std::cout << "  G " << e.g.str() << " r " << e.r[0] << " " << e.r[1] << " k " << e.k << "\n";
}

int cmd_galois(const Globals& g, const std::string& file, bool discover, const std::string& orbit) {
  auto fp = load(file);
  const std::string label = orbit.empty() ? fp.orbit : orbit;
  StabilizerOptions so;
  so.threads = g.threads;
  auto st = stabilizer(fp, so);
  auto records = load_orbit_records(data_dir() + "/orbits/records.txt");
  const OrbitRecord* rec = record_for(records, label);
  auto chi = overlaps(fp);
  // Box data apply literally only when the fiducial sits in the frame the box was written in.
  bool box_frame = rec && rec->d == fp.d && generate(dbar_of(fp.d), {rec->g0}).elements == st.s_bar.elements;
  int status = kOk;
  if (box_frame) {
    for (const auto& gen : rec->generators) {
      if (!gen.g || !gen.k || !(gen.r || fp.d % 3 != 0)) continue;
      if (rec->doublet && gen.name.size() > 1 && gen.name[1] == 's') continue;  // maps between the two orbits
      bool ok = verify_action_is_fiducial(overlap_action(chi, *gen.g, gen.r.value_or(Pair{0, 0})), tolerance(g), *gen.k);
      status |= line(ok, "box generator " + gen.name + " G " + gen.g->str() + " k " + std::to_string(*gen.k));
    }
  } else if (!discover) {
    std::cout << "fiducial is not in the box frame; running discovery\n";
  }
  if (discover || !box_frame) {
    DiscoveryOptions o;
    auto fields = load_fields(data_dir() + "/tables/fields.txt");
    if (auto it = fields.find(label); it != fields.end()) o.radicands = it->second.e0;
    else o.radicands = {squarefree_part((fp.d - 3) * (fp.d + 1))};
    o.threads = g.threads;
    auto r = discover_galois_orbit(fp, st, o);
    std::cout << "normalizer_quotient " << r.quotient_order << "\n"
              << "data " << r.image.size() << "\n";
    print_elements(r.image);
    std::cout << "discovered " << (r.image_abelian ? r.invariants.str() : "non-abelian") << "\n"
              << "centralizer_quotient " << r.centralizer_invariants.str() << "\n";
    status |= line(r.homomorphism, "homomorphism");
    status |= line(r.equals_centralizer, "image equals centralizer");
    if (r.p_realized) std::cout << "p_nonempty " << (*r.p_realized ? "yes" : "no") << "\n";
    // Reconstruction alone cannot separate these: every coset yields a fiducial for k = +-det G.
    std::cout << "non_data " << r.non_data.size() << " (excluded by field membership)\n";
  }
  return status;
}

int cmd_search(const Globals& g, long d, const std::string& type, std::uint64_t seed, int restarts, const std::string& out) {
  SearchConfig cfg;
  cfg.d = d;
  cfg.symmetry = type == "a" ? SearchSymmetry::fa : type == "none" ? SearchSymmetry::none : SearchSymmetry::fz;
  cfg.seed = seed;
  cfg.restarts = restarts;
  cfg.threads = g.threads;
  auto r = find_fiducial(cfg);
  write_fiducial(out, r.fiducial, g.digits);
  std::cout << "d " << d << "\n"
            << "branch " << r.branch << " restart " << r.restart << "\n"
            << "max_overlap_deviation " << to_fixed(r.max_deviation, 3) << "\n"
            << "wrote " << out << "\n";
  return kOk;
}

int cmd_report(const Globals& g, const std::string& target, const std::string& dims, const std::string& format, bool no_discover,
               const std::string& fiducial, bool searched) {
  ReportOptions ro;
  ro.threads = g.threads;
  ro.discover = !no_discover;
  ro.fiducial_path = fiducial;
  ro.use_bundled = !searched;
  std::vector<std::string> labels;
  if (target == "all") {
    long lo = 2, hi = 12;
    if (!dims.empty()) {
      auto dot = dims.find("..");
      if (dot == std::string::npos) throw CLI::ValidationError("--dimensions", "expected a..b");
      lo = std::stol(dims.substr(0, dot));
      hi = std::stol(dims.substr(dot + 2));
    }
    labels = report_labels(lo, hi);
  } else {
    labels = {target};
  }
  int status = kOk;
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  if (format == "table") std::cout << "orbit  d  |S~|  |S-bar|  |C|  |N|  type  C/S-bar  result\n";
  for (const auto& label : labels) {
    auto rep = report_orbit(label, ro);
    if (!rep.pass()) status = kFailed;
    if (format == "text") {
      std::cout << rep.text();
    } else if (format == "kv") {
      for (const auto& [k, v] : rep.key_values()) std::cout << k << "=" << v << "\n";
      std::cout << "\n";
    } else if (format == "json") {
      nlohmann::ordered_json o;
      for (const auto& [k, v] : rep.key_values()) o[k] = v;
      doc.push_back(o);
    } else {
      std::cout << label << "  " << rep.d << "  " << rep.s_tilde << "  " << rep.s_bar << "  " << rep.centralizer << "  " << rep.normalizer
                << "  " << rep.orbit_type << "  " << rep.quotient << "  " << (rep.pass() ? "PASS" : "FAIL") << "\n";
    }
  }
  if (format == "json") std::cout << doc.dump(2) << "\n";
  return status;
}

// |SL(2, Z_n)| = n^3 prod_{p | n} (1 - p^-2).
std::size_t sl2_order(long n) {
  std::size_t order = static_cast<std::size_t>(n * n * n);
  long m = n;
  for (long p = 2; p <= m; ++p)
    if (m % p == 0) {
      order = order / static_cast<std::size_t>(p * p) * static_cast<std::size_t>(p * p - 1);
      while (m % p == 0) m /= p;
    }
  return order;
}

// Exhaustive invariants that need no reference data beyond the bundled tables.
int cmd_selftest(const Globals& g) {
  int status = kOk;
  for (long d = 3; d <= 6; ++d) {
    auto brute = kernel_elements(d), closed = kernel_characterization(d);
    std::sort(brute.begin(), brute.end());
    std::sort(closed.begin(), closed.end());
    status |= line(brute == closed, "kernel d=" + std::to_string(d) + " (" + std::to_string(brute.size()) + " elements)");
  }
  for (long d = 2; d <= 8; ++d) {
    const long n = dbar_of(d);
    auto esl = generate(n, {ResidueMatrix(n, 1, 1, 0, 1), ResidueMatrix(n, 0, n - 1, 1, 0), ResidueMatrix(n, 1, 0, 0, n - 1)});
    bool closed = true;
    for (const auto& a : esl.elements) closed = closed && esl.contains(a.inverse());
    status |= line(closed && esl.order() == 2 * sl2_order(n), "ESL(2, Z_" + std::to_string(n) + ") order " + std::to_string(esl.order()));
  }
  for (long d = 4; d <= 9; ++d) {
    const long n = dbar_of(d);
    auto fz = generate(n, {f_z(d)});
    status |= line(centralizer(fz, n, kDefaultGroupCap, g.threads).elements == span_group(f_z(d), n).elements,
                   "type-z centralizer law d=" + std::to_string(d));
  }
  auto a_values = load_a_values(data_dir() + "/tables/a_values.txt");
  bool a_ok = true;
  for (const auto& [d, a] : a_values) a_ok = a_ok && squarefree_part((d - 3) * (d + 1)) == a;
  status |= line(a_ok, "a values (" + std::to_string(a_values.size()) + " rows)");
  auto records = load_orbit_records(data_dir() + "/orbits/records.txt");
  status |= line(!records.empty(), "orbit records load (" + std::to_string(records.size()) + " boxes)");
  for (long d = 2; d <= 4; ++d) {
    SearchConfig cfg;
    cfg.d = d;
    cfg.symmetry = SearchSymmetry::none;
    cfg.threads = g.threads;
    auto r = find_fiducial(cfg);
    status |= line(verify_sic(r.fiducial, tolerance(g)).pass, "search d=" + std::to_string(d));
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weyl-Heisenberg SIC symmetry and Galois toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--digits", g.digits, "working decimal digits")->check(CLI::Range(16u, 2000u));
  app.add_option("--tol", g.tol, "numerical tolerance (default 10^-(digits/2))");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_option("--data-dir", g.data_dir, "reference data directory (default $SICG_DATA_DIR)");

  std::string file, target, orbit, type = "z", out = "out.fid", dims, format = "text", fiducial;
  bool exhaustive = false, verify_list = false, discover = false, no_discover = false, searched = false;
  long d = 0;
  std::uint64_t seed = 1;
  int restarts = 64, shown = 20;

  auto* verify = app.add_subcommand("verify", "check that a fiducial file is a SIC");
  verify->add_option("file", file)->required();
  auto* ov = app.add_subcommand("overlaps", "print chi_p = Tr(Pi D_p) for p in Z_d^2");
  ov->add_option("file", file)->required();
  ov->add_option("--shown", shown, "digits printed")->check(CLI::Range(1, 1000));
  auto* stab = app.add_subcommand("stabilize", "symmetry group of a fiducial");
  stab->add_option("file", file)->required();
  auto* mode = stab->add_option_group("mode");
  mode->add_flag("--exhaustive", exhaustive, "scan all of ESL(2, Z_dbar) (default)");
  mode->add_flag("--verify-list", verify_list, "test only the box group <F0>");
  mode->require_option(0, 1);
  stab->add_option("--orbit", orbit, "orbit label for --verify-list when the file has none");
  auto* cent = app.add_subcommand("centralize", "centralizer and normalizer of S-bar");
  cent->add_option("target", target, "orbit label or fiducial file")->required();
  auto* gal = app.add_subcommand("galois-check", "Galois overlap action on a fiducial");
  gal->add_option("file", file)->required();
  gal->add_flag("--discover", discover, "discover the data from the overlaps");
  gal->add_option("--orbit", orbit, "orbit label when the file has none");
  auto* srch = app.add_subcommand("search", "numerical fiducial search");
  srch->add_option("-d", d, "dimension")->required()->check(CLI::Range(2L, 64L));
  srch->add_option("--type", type, "symmetry imposed")->check(CLI::IsMember({"z", "a", "none"}));
  srch->add_option("--seed", seed);
  srch->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  srch->add_option("-o,--output", out, "output fiducial file");
  auto* rep = app.add_subcommand("report", "structure report diffed against the bundled boxes");
  rep->add_option("target", target, "orbit label or 'all'")->required();
  rep->add_option("--dimensions", dims, "range a..b for 'all'");
  rep->add_option("--format", format)->check(CLI::IsMember({"text", "kv", "json", "table"}));
  rep->add_flag("--no-discover", no_discover, "skip Galois discovery");
  rep->add_option("--fiducial", fiducial, "fiducial file for a single orbit");
  rep->add_flag("--search", searched, "search instead of using bundled fiducials");
  auto* self = app.add_subcommand("selftest", "exhaustive invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (!g.data_dir.empty()) setenv("SICG_DATA_DIR", g.data_dir.c_str(), 1);
  set_working_digits(g.digits);
  if (g.threads > 0) set_default_threads(g.threads);
  try {
    if (*verify) return cmd_verify(g, file);
    if (*ov) return cmd_overlaps(file, shown);
    if (*stab) return cmd_stabilize(g, file, verify_list, orbit);
    if (*cent) return cmd_centralize(g, target);
    if (*gal) return cmd_galois(g, file, discover, orbit);
    if (*srch) return cmd_search(g, d, type, seed, restarts, out);
    if (*rep) return cmd_report(g, target, dims, format, no_discover, fiducial, searched);
    if (*self) return cmd_selftest(g);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
