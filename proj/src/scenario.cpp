#include "polyrep/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "polyrep/errors.hpp"
#include "polyrep/keyvalue.hpp"

namespace polyrep {

namespace {

constexpr Analysis kAnalysisOrder[] = {Analysis::RestPoint,   Analysis::Uninvadable,
                                       Analysis::Unbeatable,  Analysis::NegDef,
                                       Analysis::Certificate, Analysis::Basin};

struct VariantName {
  KernelVariant variant;
  std::string_view name;
};

constexpr VariantName kVariantNames[] = {
    {KernelVariant::Linear2mzw, "linear_2mzw"},
    {KernelVariant::HarvestPiecewise, "harvest_piecewise"},
    {KernelVariant::GridTable, "grid_table"},
    {KernelVariant::AffineQuadratic, "affine_quadratic"},
};

std::string_view variant_name(KernelVariant v) {
  for (const auto& n : kVariantNames)
    if (n.variant == v) return n.name;
  return "?";
}

Vector<double> to_vector(const std::vector<double>& xs) {
  Vector<double> v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
  return v;
}

Space parse_space(kv::Node node) {
  const auto lower = kv::to_numbers(node.value("lower"), "space.lower");
  const auto upper = kv::to_numbers(node.value("upper"), "space.upper");
  node.finish();
  try {
    return Space(to_vector(lower), to_vector(upper));
  } catch (const InvalidSpace& e) {
    throw ValidationError("space", e.what());
  }
}

Measure parse_measure(kv::Node node, const Space& space, const std::string& field) {
  auto atoms = node.blocks("atom");
  node.finish();
  const auto d = space.dimension();
  Points<double> pts(d, static_cast<Eigen::Index>(atoms.size()));
  Vector<double> w(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto& atom = atoms[i];
    const auto coords = kv::to_numbers(atom.value("coords"), atom.path() + ".coords");
    if (static_cast<Eigen::Index>(coords.size()) != d)
      throw ValidationError(field, "atom " + std::to_string(i) + " has " +
                                       std::to_string(coords.size()) +
                                       " coordinates, space has dimension " +
                                       std::to_string(d));
    pts.col(static_cast<Eigen::Index>(i)) = to_vector(coords);
    w(static_cast<Eigen::Index>(i)) = atom.number("weight");
    atom.finish();
  }
  try {
    return make_probability(space, std::move(pts), std::move(w));
  } catch (const Error& e) {
    throw ValidationError(field, e.what());
  }
}

KernelSpec parse_kernel(kv::Node node, const Space& space,
                        const std::filesystem::path& base_dir) {
  KernelSpec spec;
  const std::string name = node.word("variant");
  const auto hit = std::find_if(std::begin(kVariantNames), std::end(kVariantNames),
                                [&](const VariantName& v) { return v.name == name; });
  if (hit == std::end(kVariantNames))
    throw ValidationError("kernel.variant", "unknown variant '" + name + "'");
  spec.variant = hit->variant;

  const kv::Value* bound = node.find_value("bound");
  if (node.has_block("params")) {
    auto params = node.block("params");
    switch (spec.variant) {
      case KernelVariant::AffineQuadratic:
        spec.a = params.number_or("a", 0.0);
        spec.b = params.number_or("b", 0.0);
        spec.c = params.number_or("c", 0.0);
        spec.d = params.number_or("d", 0.0);
        break;
      case KernelVariant::GridTable: {
        if (const kv::Value* file = params.find_value("table_csv")) {
          if (!file->is_word())
            throw ParseError("kernel.params.table_csv", file->line, "expected a path");
          load_grid_csv(base_dir / file->text, spec);
        } else {
          const kv::Value& grid = params.value("grid");
          const kv::Value& table = params.value("table");
          if (!grid.is_list() || !table.is_list())
            throw ParseError("kernel.params", grid.line, "grid and table must be lists");
          const auto n = static_cast<Eigen::Index>(grid.items.size());
          spec.grid.resize(space.dimension(), n);
          for (Eigen::Index i = 0; i < n; ++i) {
            const auto c = kv::to_numbers(grid.items[static_cast<std::size_t>(i)],
                                          "kernel.params.grid");
            if (static_cast<Eigen::Index>(c.size()) != space.dimension())
              throw ValidationError("kernel.params.grid", "grid point dimension mismatch");
            spec.grid.col(i) = to_vector(c);
          }
          if (static_cast<Eigen::Index>(table.items.size()) != n)
            throw ValidationError("kernel.params.table", "table must have n rows");
          spec.table.resize(n, n);
          for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = kv::to_numbers(table.items[static_cast<std::size_t>(i)],
                                            "kernel.params.table");
            if (static_cast<Eigen::Index>(row.size()) != n)
              throw ValidationError("kernel.params.table", "table must have n columns");
            spec.table.row(i) = to_vector(row).transpose();
          }
        }
        break;
      }
      default:
        break;
    }
    params.finish();
  } else if (spec.variant == KernelVariant::GridTable) {
    throw ParseError("kernel.params", node.line(), "grid_table needs params");
  }
  node.finish();

  try {
    Kernel::Params params;
    switch (spec.variant) {
      case KernelVariant::Linear2mzw: params = kernels::Linear2mzw{}; break;
      case KernelVariant::HarvestPiecewise: params = kernels::HarvestPiecewise{}; break;
      case KernelVariant::AffineQuadratic:
        params = kernels::AffineQuadratic<double>{spec.a, spec.b, spec.c, spec.d};
        break;
      case KernelVariant::GridTable:
        params = kernels::GridTable<double>{spec.grid, spec.table};
        break;
    }
    std::optional<double> declared;
    if (bound) declared = kv::to_number(*bound, "kernel.bound");
    spec.bound = Kernel(space, std::move(params), declared).bound();
  } catch (const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) throw;
    throw ValidationError("kernel", e.what());
  }
  return spec;
}

IntegratorConfig<double> parse_integrator(kv::Node node) {
  IntegratorConfig<double> cfg;
  if (const kv::Value* m = node.find_value("method")) {
    if (m->is_word() && m->text == "exponential")
      cfg.method = Method::Exponential;
    else if (m->is_word() && m->text == "rk4")
      cfg.method = Method::RK4;
    else
      throw ValidationError("integrator.method", "expected exponential or rk4");
  }
  cfg.dt = node.number("dt");
  cfg.t_end = node.number("t_end");
  if (node.has("record_every")) {
    const auto r = node.integer("record_every");
    if (r < 1 || r > 1'000'000'000)
      throw ValidationError("integrator.record_every", "must be a positive integer");
    cfg.record_every = static_cast<int>(r);
  }
  cfg.renormalize = node.boolean_or("renormalize", true);
  node.finish();
  return cfg;
}

NeighborhoodSpec<double> parse_neighborhood(kv::Node node) {
  NeighborhoodSpec<double> spec;
  spec.epsilon = node.number("epsilon");
  const auto n = node.integer("n_samples");
  const auto g = node.integer("mutant_grid");
  if (n < 0 || n > 10'000'000)
    throw ValidationError("neighborhood.n_samples", "must be a non-negative integer");
  if (g < 1 || g > 100'000)
    throw ValidationError("neighborhood.mutant_grid", "must be a positive integer");
  spec.n_samples = static_cast<int>(n);
  spec.mutant_grid = static_cast<int>(g);
  if (node.has("seed")) spec.seed = node.unsigned_integer("seed");
  node.finish();
  return spec;
}

std::vector<Analysis> parse_analyses(const kv::Value& v) {
  if (!v.is_list()) throw ParseError("analyses", v.line, "expected a list");
  std::vector<Analysis> wanted;
  for (const auto& item : v.items) {
    const auto hit = std::find_if(std::begin(kAnalysisOrder), std::end(kAnalysisOrder),
                                  [&](Analysis a) { return item.text == to_string(a); });
    if (!item.is_word() || hit == std::end(kAnalysisOrder))
      throw ValidationError("analyses", "unknown analysis '" + item.text + "'");
    wanted.push_back(*hit);
  }
  std::vector<Analysis> ordered;
  for (Analysis a : kAnalysisOrder)
    if (std::find(wanted.begin(), wanted.end(), a) != wanted.end()) ordered.push_back(a);
  return ordered;
}

void validate(const ScenarioConfig& cfg) {
  using A = Analysis;
  const auto kernel = cfg.build_kernel();
  if (cfg.initial) {
    for (Eigen::Index j = 0; j < cfg.target.size(); ++j) {
      if (!(cfg.initial->mass_at(cfg.target.point(j)) > 0.0))
        throw ValidationError("initial", "supp(target) must be contained in supp(initial)");
    }
  }
  if (cfg.integrator) {
    try {
      validate(*cfg.integrator, kernel.bound());
    } catch (const StepSizeTooLarge& e) {
      throw ValidationError("integrator.dt", e.what());
    } catch (const InvalidIntegratorConfig& e) {
      throw ValidationError("integrator", e.what());
    }
  }
  if (cfg.neighborhood) {
    try {
      validate(*cfg.neighborhood, cfg.target);
    } catch (const InvalidEpsilon& e) {
      throw ValidationError("epsilon", e.what());
    } catch (const Error& e) {
      throw ValidationError("neighborhood", e.what());
    }
  }
  const bool needs_integrator = cfg.requests(A::Basin) || cfg.requests(A::Certificate);
  if (needs_integrator && !cfg.integrator)
    throw ValidationError("integrator", "basin and certificate need an integrator block");
  if (cfg.requests(A::Certificate) && !cfg.initial)
    throw ValidationError("initial", "certificate needs an initial state to integrate");
  const bool needs_sampler = cfg.requests(A::Uninvadable) || cfg.requests(A::Unbeatable) ||
                             cfg.requests(A::NegDef) || cfg.requests(A::Basin);
  if (needs_sampler && !cfg.neighborhood)
    throw ValidationError("neighborhood", "sampler-based analyses need a neighborhood block");
  if (cfg.witness && !cfg.requests(A::NegDef))
    throw ValidationError("witness", "a witness is only used by the negdef analysis");
}

void write_measure(std::ostringstream& out, const char* key, const Measure& m) {
  out << key << " {\n";
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    out << "  atom { coords = [";
    for (Eigen::Index r = 0; r < m.points().rows(); ++r)
      out << (r ? ", " : "") << kv::format_number(m.points()(r, i));
    out << "] weight = " << kv::format_number(m.weight(i)) << " }\n";
  }
  out << "}\n";
}

void write_list(std::ostringstream& out, const Vector<double>& v) {
  out << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << (i ? ", " : "") << kv::format_number(v(i));
  out << "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::RestPoint: return "rest_point";
    case Analysis::Uninvadable: return "uninvadable";
    case Analysis::Unbeatable: return "unbeatable";
    case Analysis::NegDef: return "negdef";
    case Analysis::Certificate: return "certificate";
    case Analysis::Basin: return "basin";
  }
  return "?";
}

bool operator==(const KernelSpec& x, const KernelSpec& y) {
  const bool same_grid = x.grid.rows() == y.grid.rows() && x.grid.cols() == y.grid.cols() &&
                         (x.grid.size() == 0 || x.grid == y.grid);
  const bool same_table = x.table.rows() == y.table.rows() &&
                          x.table.cols() == y.table.cols() &&
                          (x.table.size() == 0 || x.table == y.table);
  return x.variant == y.variant && x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d &&
         x.bound == y.bound && same_grid && same_table;
}

Kernel ScenarioConfig::build_kernel() const {
  Kernel::Params params;
  switch (kernel.variant) {
    case KernelVariant::Linear2mzw: params = kernels::Linear2mzw{}; break;
    case KernelVariant::HarvestPiecewise: params = kernels::HarvestPiecewise{}; break;
    case KernelVariant::AffineQuadratic:
      params = kernels::AffineQuadratic<double>{kernel.a, kernel.b, kernel.c, kernel.d};
      break;
    case KernelVariant::GridTable:
      params = kernels::GridTable<double>{kernel.grid, kernel.table};
      break;
  }
  return Kernel(space, std::move(params), kernel.bound);
}

bool ScenarioConfig::requests(Analysis a) const {
  return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  const kv::Document doc = kv::parse(text);
  kv::Node root = doc.root();

  // Required sections are checked up front so the error names the section.
  for (const char* key : {"space", "kernel", "target"}) {
    if (!root.has_block(key)) throw ParseError(key, root.line(), "missing required block");
  }

  std::string name = root.has("name") ? root.word("name") : std::string("scenario");
  Space space = parse_space(root.block("space"));
  KernelSpec kernel = parse_kernel(root.block("kernel"), space, base_dir);
  Measure target = parse_measure(root.block("target"), space, "target");

  ScenarioConfig cfg{name, space, kernel, target, std::nullopt, std::nullopt,
                     std::nullopt, std::nullopt, {}, {}};
  if (root.has_block("initial"))
    cfg.initial = parse_measure(root.block("initial"), space, "initial");
  if (root.has_block("witness"))
    cfg.witness = parse_measure(root.block("witness"), space, "witness");
  if (root.has_block("integrator")) cfg.integrator = parse_integrator(root.block("integrator"));
  if (root.has_block("neighborhood"))
    cfg.neighborhood = parse_neighborhood(root.block("neighborhood"));
  if (const kv::Value* a = root.find_value("analyses")) cfg.analyses = parse_analyses(*a);

  cfg.outputs.trajectory_csv = name + "_trajectory.csv";
  cfg.outputs.report = name + "_report.json";
  if (root.has_block("outputs")) {
    auto out = root.block("outputs");
    if (out.has("trajectory_csv")) cfg.outputs.trajectory_csv = out.word("trajectory_csv");
    if (out.has("report")) cfg.outputs.report = out.word("report");
    out.finish();
  }
  root.finish();

  validate(cfg);
  return cfg;
}

std::string serialize(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "name = " << quoted(cfg.name) << "\n";
  out << "space { lower = ";
  write_list(out, cfg.space.lower());
  out << " upper = ";
  write_list(out, cfg.space.upper());
  out << " }\n";

  const auto& k = cfg.kernel;
  out << "kernel {\n  variant = " << variant_name(k.variant) << "\n";
  out << "  bound = " << kv::format_number(k.bound) << "\n";
  if (k.variant == KernelVariant::AffineQuadratic) {
    out << "  params { a = " << kv::format_number(k.a) << " b = " << kv::format_number(k.b)
        << " c = " << kv::format_number(k.c) << " d = " << kv::format_number(k.d) << " }\n";
  } else if (k.variant == KernelVariant::GridTable) {
    out << "  params {\n    grid = [";
    for (Eigen::Index i = 0; i < k.grid.cols(); ++i) {
      out << (i ? ", " : "");
      write_list(out, k.grid.col(i));
    }
    out << "]\n    table = [";
    for (Eigen::Index i = 0; i < k.table.rows(); ++i) {
      out << (i ? ",\n             " : "");
      write_list(out, k.table.row(i).transpose());
    }
    out << "]\n  }\n";
  }
  out << "}\n";

  write_measure(out, "target", cfg.target);
  if (cfg.initial) write_measure(out, "initial", *cfg.initial);
  if (cfg.witness) write_measure(out, "witness", *cfg.witness);
  if (cfg.integrator) {
    const auto& i = *cfg.integrator;
    out << "integrator { method = " << to_string(i.method)
        << " dt = " << kv::format_number(i.dt) << " t_end = " << kv::format_number(i.t_end)
        << " record_every = " << i.record_every
        << " renormalize = " << (i.renormalize ? "true" : "false") << " }\n";
  }
  if (cfg.neighborhood) {
    const auto& n = *cfg.neighborhood;
    out << "neighborhood { epsilon = " << kv::format_number(n.epsilon)
        << " n_samples = " << n.n_samples << " mutant_grid = " << n.mutant_grid
        << " seed = " << n.seed << " }\n";
  }
  out << "analyses = [";
  for (std::size_t i = 0; i < cfg.analyses.size(); ++i)
    out << (i ? ", " : "") << to_string(cfg.analyses[i]);
  out << "]\n";
  out << "outputs { trajectory_csv = " << quoted(cfg.outputs.trajectory_csv)
      << " report = " << quoted(cfg.outputs.report) << " }\n";
  return out.str();
}

void load_grid_csv(const std::filesystem::path& path, KernelSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ValidationError("kernel.params.table_csv", "cannot open " + path.string());
  auto read_row = [&](std::string& line) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ValidationError("kernel.params.table_csv",
                              "malformed cell '" + cell + "' in " + path.string());
      }
    }
    return row;
  };
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(read_row(line));
  }
  if (rows.empty()) throw ValidationError("kernel.params.table_csv", "empty table file");
  const auto n = static_cast<Eigen::Index>(rows.front().size());
  if (static_cast<Eigen::Index>(rows.size()) != n + 1)
    throw ValidationError("kernel.params.table_csv",
                          "expected one grid line and n table rows");
  spec.grid.resize(1, n);
  for (Eigen::Index i = 0; i < n; ++i) spec.grid(0, i) = rows[0][static_cast<std::size_t>(i)];
  spec.table.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i + 1)];
    if (static_cast<Eigen::Index>(r.size()) != n)
      throw ValidationError("kernel.params.table_csv", "table rows must have n entries");
    for (Eigen::Index j = 0; j < n; ++j) spec.table(i, j) = r[static_cast<std::size_t>(j)];
  }
}

}  // namespace polyrep
