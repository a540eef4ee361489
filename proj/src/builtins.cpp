#include <algorithm>

#include "polyrep/scenario.hpp"

namespace polyrep {

namespace {

constexpr std::string_view kExample1 = R"(# Harvest game on [0,1]; the three-point uniform state is a rest point.
name = example1
space { lower = 0 upper = 1 }
kernel { variant = harvest_piecewise }
target {
  atom { coords = 0   weight = 1/3 }
  atom { coords = 1/2 weight = 1/3 }
  atom { coords = 1   weight = 1/3 }
}
initial {
  atom { coords = 0   weight = 0.3 }
  atom { coords = 1/2 weight = 0.3 }
  atom { coords = 1   weight = 0.4 }
}
integrator { method = exponential dt = 0.01 t_end = 5 record_every = 10 }
analyses = [rest_point]
)";

constexpr std::string_view kExample2 = R"(# u(z,w) = 2 - zw on [-1,1]: strongly unbeatable but not negative definite.
name = example2
space { lower = -1 upper = 1 }
kernel { variant = linear_2mzw }
target {
  atom { coords = -1 weight = 1/2 }
  atom { coords = 1  weight = 1/2 }
}
initial {
  atom { coords = -1 weight = 0.6 }
  atom { coords = 1  weight = 0.4 }
}
witness {
  atom { coords = -1/2 weight = 1/2 }
  atom { coords = 1/2  weight = 1/2 }
}
integrator { method = exponential dt = 0.01 t_end = 10 }
neighborhood { epsilon = 0.5 n_samples = 100 mutant_grid = 8 seed = 1 }
analyses = [rest_point, unbeatable, negdef, certificate]
)";

constexpr std::string_view kExample2Basin = R"(# Convergence probe around the two-point rest state of u(z,w) = 2 - zw.
name = example2_basin
space { lower = -1 upper = 1 }
kernel { variant = linear_2mzw }
target {
  atom { coords = -1 weight = 1/2 }
  atom { coords = 1  weight = 1/2 }
}
integrator { method = exponential dt = 0.01 t_end = 15 record_every = 10 }
neighborhood { epsilon = 0.2 n_samples = 50 mutant_grid = 8 seed = 1 }
analyses = [basin]
)";

constexpr std::string_view kCoordination = R"(# u(z,w) = zw: the symmetric two-point state is an unstable rest point.
name = coordination_zw
space { lower = -1 upper = 1 }
kernel { variant = affine_quadratic params { a = 0 b = 0 c = 0 d = 1 } }
target {
  atom { coords = -1 weight = 1/2 }
  atom { coords = 1  weight = 1/2 }
}
initial {
  atom { coords = -1 weight = 0.45 }
  atom { coords = 1  weight = 0.55 }
}
integrator { method = exponential dt = 0.01 t_end = 15 }
neighborhood { epsilon = 0.5 n_samples = 100 mutant_grid = 8 seed = 1 }
analyses = [rest_point, unbeatable, certificate]
)";

constexpr std::string_view kNegdefMzw = R"(# u(z,w) = -zw: the symmetric two-point state attracts nearby populations.
name = negdef_mzw
space { lower = -1 upper = 1 }
kernel { variant = affine_quadratic params { a = 0 b = 0 c = 0 d = -1 } }
target {
  atom { coords = -1 weight = 1/2 }
  atom { coords = 1  weight = 1/2 }
}
initial {
  atom { coords = -1 weight = 0.6 }
  atom { coords = 1  weight = 0.4 }
}
integrator { method = exponential dt = 0.01 t_end = 10 }
neighborhood { epsilon = 0.5 n_samples = 100 mutant_grid = 8 seed = 1 }
analyses = [rest_point, uninvadable, unbeatable, negdef, certificate]
)";

}  // namespace

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> all = {
      {"example1", "harvest game, three-point rest state", kExample1},
      {"example2", "2 - zw, unbeatable but not negative definite", kExample2},
      {"example2_basin", "2 - zw, convergence from 50 nearby starts", kExample2Basin},
      {"coordination_zw", "zw, unstable symmetric rest state", kCoordination},
      {"negdef_mzw", "-zw, stable symmetric rest state", kNegdefMzw},
  };
  return all;
}

const Builtin* find_builtin(std::string_view name) {
  const auto& all = builtins();
  const auto it = std::find_if(all.begin(), all.end(),
                               [&](const Builtin& b) { return b.name == name; });
  return it == all.end() ? nullptr : &*it;
}

}  // namespace polyrep
