#include "bqsp/compiler.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace bqsp {

namespace {

constexpr double kZeroAngleTol = 1e-15;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v) {
    if (std::abs(x) > kZeroAngleTol) return false;
  }
  return true;
}

std::vector<double> negated(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

void append(std::vector<GateInstruction>& dst, std::vector<GateInstruction> src) {
  for (auto& i : src) dst.push_back(std::move(i));
}

}  // namespace

std::vector<double> TrigGateParams::kappas() const {
  std::vector<double> k(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) k[i] = mu[i] / 2.0;
  return k;
}

GateCounts count_gates(const std::vector<GateInstruction>& instructions) {
  GateCounts c;
  for (const auto& inst : instructions) {
    if (std::holds_alternative<ConditionalDisplacement>(inst)) ++c.conditional_displacements;
    else if (std::holds_alternative<RotationZ>(inst)) ++c.rotations;
    else if (std::holds_alternative<HadamardYZ>(inst)) ++c.hadamards;
    else if (std::holds_alternative<FreeEvolution>(inst)) ++c.free_evolutions;
  }
  return c;
}

void GateProgram::check_shape() const {
  for (size_t i = 0; i + 1 < instructions.size(); ++i) {
    if (std::holds_alternative<PostSelectUp>(instructions[i])) {
      throw std::logic_error("only the final instruction may be PostSelectUp");
    }
  }
  if (meta.trotter_steps == 0 && meta.instructions_per_step == 0) return;
  long long body = static_cast<long long>(instructions.size()) - (meta.postselect ? 1 : 0);
  if (body != static_cast<long long>(meta.trotter_steps) * meta.instructions_per_step) {
    throw std::logic_error("program instruction count does not match r * per_step");
  }
}

std::vector<GateInstruction> compile_qsp_block(double theta,
                                               const std::vector<double>& kappas,
                                               const std::vector<double>& angles) {
  if (kappas.size() != angles.size()) {
    throw std::invalid_argument("kappa and angle vectors must have equal length");
  }
  for (double k : kappas) {
    if (!std::isfinite(k)) throw std::invalid_argument("kappa must be finite");
  }
  std::vector<GateInstruction> out;
  out.push_back(RotationZ{M_PI / 2.0});
  out.push_back(ConditionalDisplacement{kappas, angles});
  if (std::abs(theta - M_PI / 2.0) > kZeroAngleTol) {
    out.push_back(RotationZ{theta - M_PI / 2.0});
  }
  out.push_back(ConditionalDisplacement{kappas, angles});
  // phi_2 = 0 is omitted.
  return out;
}

std::vector<GateInstruction> compile_trig_gate(const TrigGateParams& params,
                                               std::vector<std::string>* warnings,
                                               const CompileOptions& options) {
  if (params.lambda == 0.0) return {};
  if (params.angles.size() != params.mu.size()) {
    throw std::invalid_argument("trig gate angle vector length mismatch");
  }

  if (options.lambda_split > 0.0 && std::abs(params.lambda) > options.lambda_split) {
    // T gates with the same mu compose additively in Lambda.
    int pieces = static_cast<int>(std::ceil(std::abs(params.lambda) / options.lambda_split));
    TrigGateParams part = params;
    part.lambda = params.lambda / pieces;
    std::vector<GateInstruction> out;
    for (int i = 0; i < pieces; ++i) append(out, compile_trig_gate(part, warnings, {}));
    return out;
  }

  double theta = params.theta();
  if (warnings && std::abs(theta) > options.theta_warn) {
    std::ostringstream w;
    w << "trig gate |theta| = " << std::abs(theta) << " exceeds " << options.theta_warn
      << "; the Lie-Trotter construction assumes theta << 1";
    warnings->push_back(w.str());
  }

  std::vector<double> kap = params.kappas();
  std::vector<GateInstruction> out;
  if (params.kind == TrigGateParams::Kind::Cosine) {
    // U(theta, kappa) U(theta, -kappa), rightmost factor applied first.
    append(out, compile_qsp_block(theta, negated(kap), params.angles));
    append(out, compile_qsp_block(theta, kap, params.angles));
  } else {
    out.push_back(HadamardYZ{});
    append(out, compile_qsp_block(-theta, negated(kap), params.angles));
    append(out, compile_qsp_block(theta, kap, params.angles));
    out.push_back(HadamardYZ{});
  }
  return out;
}

std::vector<GateInstruction> compile_trotter_step(const FourierSeries& series,
                                                  const std::vector<double>& frequencies,
                                                  double dt,
                                                  std::vector<std::string>* warnings,
                                                  const CompileOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (static_cast<int>(frequencies.size()) != series.num_modes) {
    throw std::invalid_argument("frequency vector does not match series modes");
  }
  std::vector<GateInstruction> out;
  double free_dt = options.strang ? dt / 2.0 : dt;
  out.push_back(FreeEvolution{free_dt, frequencies});
  for (const auto& term : series.terms) {
    TrigGateParams p;
    p.mu = series.mu_of(term);
    p.angles = series.quadrature_angles;
    if (term.a != 0.0) {
      p.kind = TrigGateParams::Kind::Cosine;
      p.lambda = term.a * dt;
      append(out, compile_trig_gate(p, warnings, options));
    }
    if (term.b != 0.0) {
      p.kind = TrigGateParams::Kind::Sine;
      p.lambda = term.b * dt;
      append(out, compile_trig_gate(p, warnings, options));
    }
  }
  if (options.strang) out.push_back(FreeEvolution{dt / 2.0, frequencies});
  return out;
}

GateProgram compile_program(const HamiltonianSpec& ham, int max_order, double dt,
                            int steps, bool postselect, const ModeSpace& space,
                            const CompileOptions& options) {
  ham.validate();
  if (steps < 1) throw std::invalid_argument("need at least one Trotter step");
  if (ham.num_modes() != space.num_modes) {
    throw std::invalid_argument("ModeSpace mode count does not match the Hamiltonian");
  }
  if (!space.qubit_present) {
    throw std::invalid_argument("compiled programs act on a qubit-oscillator space");
  }

  FourierSeries series = ham.potential.is_polynomial()
                             ? coefficients_polynomial(ham.potential, max_order)
                             : coefficients_quadrature(ham.potential, max_order);

  GateProgram prog;
  prog.meta.space = space;
  prog.meta.dt = dt;
  prog.meta.trotter_steps = steps;
  prog.meta.max_order = max_order;
  prog.meta.postselect = postselect;
  prog.meta.source_digest = hamiltonian_digest(ham);

  std::vector<GateInstruction> step =
      compile_trotter_step(series, ham.frequencies, dt, &prog.meta.warnings, options);
  prog.meta.instructions_per_step = static_cast<int>(step.size());
  prog.instructions.reserve(step.size() * steps + 1);
  for (int s = 0; s < steps; ++s) {
    for (const auto& inst : step) prog.instructions.push_back(inst);
  }
  if (postselect) prog.instructions.push_back(PostSelectUp{});
  prog.check_shape();
  return prog;
}

namespace {

// Fusion works per segment between barriers (HadamardYZ, FreeEvolution,
// PostSelectUp). Within a segment only RotationZ and ConditionalDisplacement
// appear; quarter-turn rotation chunks commute through a conditional
// displacement at the cost of a kappa sign flip.
std::vector<GateInstruction> normalize_segment(const std::vector<GateInstruction>& seg) {
  std::vector<GateInstruction> out;
  long long quarters = 0;  // pending multiples of pi/2 moved toward the end

  auto push_rotation = [&](double angle) {
    while (!out.empty() && std::holds_alternative<RotationZ>(out.back())) {
      angle += std::get<RotationZ>(out.back()).angle;
      out.pop_back();
    }
    if (std::abs(angle) > kZeroAngleTol) out.push_back(RotationZ{angle});
  };
  auto push_displacement = [&](ConditionalDisplacement cd) {
    if (!out.empty() && std::holds_alternative<ConditionalDisplacement>(out.back())) {
      const auto& prev = std::get<ConditionalDisplacement>(out.back());
      if (prev.angles == cd.angles) {
        for (size_t i = 0; i < cd.kappas.size(); ++i) cd.kappas[i] += prev.kappas[i];
        out.pop_back();
      }
    }
    if (!all_zero(cd.kappas)) out.push_back(std::move(cd));
  };

  for (const auto& inst : seg) {
    if (const auto* r = std::get_if<RotationZ>(&inst)) {
      long long q = std::llround(r->angle / (M_PI / 2.0));
      double rem = r->angle - q * (M_PI / 2.0);
      quarters += q;
      push_rotation(rem);
    } else {
      ConditionalDisplacement cd = std::get<ConditionalDisplacement>(inst);
      if (quarters % 2 != 0) {
        for (double& k : cd.kappas) k = -k;
      }
      push_displacement(std::move(cd));
    }
  }
  // exp(i q pi/2 sigma_z) has period q mod 4.
  long long qm = ((quarters % 4) + 4) % 4;
  if (qm != 0) {
    double angle = (qm == 3) ? -M_PI / 2.0 : qm * (M_PI / 2.0);
    push_rotation(angle);
  }
  return out;
}

long long displacement_count(const std::vector<GateInstruction>& seg) {
  long long n = 0;
  for (const auto& inst : seg) {
    if (std::holds_alternative<ConditionalDisplacement>(inst)) ++n;
  }
  return n;
}

}  // namespace

GateProgram fuse_displacements(const GateProgram& program) {
  GateProgram out;
  out.meta = program.meta;
  out.instructions.clear();

  std::vector<GateInstruction> segment;
  auto flush = [&]() {
    if (segment.empty()) return;
    std::vector<GateInstruction> normalized = normalize_segment(segment);
    // Keep the original stream when no displacement is saved.
    if (displacement_count(normalized) < displacement_count(segment)) {
      append(out.instructions, std::move(normalized));
    } else {
      append(out.instructions, std::move(segment));
    }
    segment.clear();
  };

  for (const auto& inst : program.instructions) {
    bool barrier = std::holds_alternative<HadamardYZ>(inst) ||
                   std::holds_alternative<FreeEvolution>(inst) ||
                   std::holds_alternative<PostSelectUp>(inst);
    if (barrier) {
      flush();
      out.instructions.push_back(inst);
    } else {
      segment.push_back(inst);
    }
  }
  flush();

  // Identical steps fuse identically and barriers sit at step boundaries, so
  // the result stays r-periodic.
  if (out.meta.trotter_steps > 0) {
    long long body = static_cast<long long>(out.instructions.size()) -
                     (out.meta.postselect ? 1 : 0);
    if (body % out.meta.trotter_steps != 0) {
      throw std::logic_error("fusion broke the step periodicity");
    }
    out.meta.instructions_per_step = static_cast<int>(body / out.meta.trotter_steps);
  }
  out.check_shape();
  return out;
}

ResourceEstimate resource_estimate(const HamiltonianSpec& ham, int max_order, int steps,
                                   double eta, int native_order, int modes_per_term) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (native_order < 2) throw std::invalid_argument("native interaction order must be >= 2");
  if (modes_per_term < 1 || modes_per_term > ham.num_modes()) {
    throw std::invalid_argument("modes_per_term must lie in [1, N]");
  }

  // Counts do not depend on dt (pruning happens at the series level), so a
  // nominal step and minimal truncation suffice.
  ModeSpace nominal = qubit_oscillator_space(2, ham.num_modes());
  GateProgram prog = compile_program(ham, max_order, 1.0, steps, false, nominal);

  ResourceEstimate est;
  est.counts = count_gates(prog.instructions);
  FourierSeries series = ham.potential.is_polynomial()
                             ? coefficients_polynomial(ham.potential, max_order)
                             : coefficients_quadrature(ham.potential, max_order);
  for (const auto& t : series.terms) {
    if (t.a != 0.0) ++est.fourier_terms;
    if (t.b != 0.0) ++est.fourier_terms;
  }
  double nf_m = std::pow(static_cast<double>(max_order), modes_per_term);
  est.qsp_time_proxy = 4.0 * nf_m / eta;
  est.native_time_proxy = std::pow(eta, -native_order);
  est.speedup_threshold = std::pow(eta, -(native_order - 1));
  est.speedup = nf_m < est.speedup_threshold;
  return est;
}

namespace {

std::string instruction_line(const GateInstruction& inst) {
  std::string line;
  if (const auto* r = std::get_if<RotationZ>(&inst)) {
    line = "rotz " + g17(r->angle);
  } else if (std::holds_alternative<HadamardYZ>(inst)) {
    line = "hyz";
  } else if (const auto* cd = std::get_if<ConditionalDisplacement>(&inst)) {
    line = "cdisp " + std::to_string(cd->kappas.size());
    for (double k : cd->kappas) line += " " + g17(k);
    for (double a : cd->angles) line += " " + g17(a);
  } else if (const auto* f = std::get_if<FreeEvolution>(&inst)) {
    line = "free " + g17(f->duration);
    for (double w : f->frequencies) line += " " + g17(w);
  } else {
    line = "postselect_up";
  }
  return line;
}

}  // namespace

std::string fnv1a_hex_digest(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

std::string serialize_program(const GateProgram& program) {
  std::string body;
  for (const auto& inst : program.instructions) body += instruction_line(inst) + "\n";

  std::string out = "# bqsp gate program v1\n";
  out += "space qubit=" + std::to_string(program.meta.space.qubit_present ? 1 : 0) +
         " modes=" + std::to_string(program.meta.space.num_modes) +
         " trunc=" + std::to_string(program.meta.space.truncation_dim) + "\n";
  out += "meta dt=" + g17(program.meta.dt) +
         " steps=" + std::to_string(program.meta.trotter_steps) +
         " max_order=" + std::to_string(program.meta.max_order) +
         " per_step=" + std::to_string(program.meta.instructions_per_step) +
         " source=" + program.meta.source_digest + "\n";
  out += "digest " + fnv1a_hex_digest(body) + "\n";
  out += body;
  return out;
}

GateProgram parse_program(const std::string& text) {
  GateProgram prog;
  std::istringstream in(text);
  std::string line;
  std::string body;
  bool saw_space = false, saw_meta = false;
  std::string digest;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "space") {
      std::string kv;
      int qubit = 0, modes = 0, trunc = 0;
      while (ls >> kv) {
        if (kv.rfind("qubit=", 0) == 0) qubit = std::stoi(kv.substr(6));
        else if (kv.rfind("modes=", 0) == 0) modes = std::stoi(kv.substr(6));
        else if (kv.rfind("trunc=", 0) == 0) trunc = std::stoi(kv.substr(6));
      }
      prog.meta.space = qubit ? qubit_oscillator_space(trunc, modes)
                              : oscillator_space(trunc, modes);
      saw_space = true;
    } else if (tag == "meta") {
      std::string kv;
      while (ls >> kv) {
        if (kv.rfind("dt=", 0) == 0) prog.meta.dt = std::stod(kv.substr(3));
        else if (kv.rfind("steps=", 0) == 0) prog.meta.trotter_steps = std::stoi(kv.substr(6));
        else if (kv.rfind("max_order=", 0) == 0) prog.meta.max_order = std::stoi(kv.substr(10));
        else if (kv.rfind("per_step=", 0) == 0) prog.meta.instructions_per_step = std::stoi(kv.substr(9));
        else if (kv.rfind("source=", 0) == 0) prog.meta.source_digest = kv.substr(7);
      }
      saw_meta = true;
    } else if (tag == "digest") {
      ls >> digest;
    } else if (tag == "rotz") {
      double a;
      ls >> a;
      prog.instructions.push_back(RotationZ{a});
      body += instruction_line(prog.instructions.back()) + "\n";
    } else if (tag == "hyz") {
      prog.instructions.push_back(HadamardYZ{});
      body += "hyz\n";
    } else if (tag == "cdisp") {
      size_t n;
      ls >> n;
      ConditionalDisplacement cd;
      cd.kappas.resize(n);
      cd.angles.resize(n);
      for (size_t i = 0; i < n; ++i) ls >> cd.kappas[i];
      for (size_t i = 0; i < n; ++i) ls >> cd.angles[i];
      prog.instructions.push_back(std::move(cd));
      body += instruction_line(prog.instructions.back()) + "\n";
    } else if (tag == "free") {
      FreeEvolution f;
      ls >> f.duration;
      double w;
      while (ls >> w) f.frequencies.push_back(w);
      prog.instructions.push_back(std::move(f));
      body += instruction_line(prog.instructions.back()) + "\n";
    } else if (tag == "postselect_up") {
      prog.instructions.push_back(PostSelectUp{});
      prog.meta.postselect = true;
      body += "postselect_up\n";
    } else {
      throw std::invalid_argument("unknown instruction tag in program IR: " + tag);
    }
  }
  if (!saw_space || !saw_meta) {
    throw std::invalid_argument("program IR is missing its space or meta header");
  }
  if (!digest.empty() && digest != fnv1a_hex_digest(body)) {
    throw std::invalid_argument("program IR digest mismatch");
  }
  long long instructions = static_cast<long long>(prog.instructions.size()) -
                           (prog.meta.postselect ? 1 : 0);
  if (instructions != static_cast<long long>(prog.meta.trotter_steps) *
                          prog.meta.instructions_per_step) {
    throw std::invalid_argument("program IR header shape does not match its instructions");
  }
  prog.check_shape();
  return prog;
}

}  // namespace bqsp
