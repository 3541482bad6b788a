// szego: command-line driver.
//   szego kernel-table [--config f] [--out f]
//   szego project <field> --out f [--config f] [--format csv|binary] [--jobs k]
//   szego verify [--config f] [--out f] [--jobs k]
//   szego make-packet [--config f] [--out f] [--format csv|binary]
// Exit codes: 0 ok, 1 verification failure, 2 usage or parse error, 3 budget violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "szego/config.hpp"
#include "szego/field_io.hpp"
#include "szego/forms.hpp"
#include "szego/phase.hpp"
#include "szego/verify.hpp"

using namespace szego;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify = 1;
constexpr int exit_usage = 2;
constexpr int exit_budget = 3;

struct Options {
  std::string config;
  std::string out;
  std::string format = "binary";
  int jobs = -1;  // -1: take run.jobs from the config
  std::string input;
};

RunConfig load(const Options& o) {
  RunConfig c = o.config.empty() ? load_config(KeyValueText{}) : load_config_file(o.config);
  if (o.jobs >= 0) c.jobs = o.jobs;
  return c;
}

/// Writes text to --out, or stdout when no path is given.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + o.out + "' for writing");
  f << text;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string point_cell(const HeisenbergPoint& x) {
  std::string s;
  for (const cplx& z : x.z) s += num(z.real()) + ";" + num(z.imag()) + ";";
  return s + num(x.x_last);
}

std::vector<HeisenbergPoint> default_table_points(int n) {
  const cplx zs[3] = {{0.0, 0.0}, {0.5, 0.5}, {-1.0, 0.25}};
  const double xs[3] = {0.0, 0.25, -0.5};
  std::vector<HeisenbergPoint> pts;
  for (int k = 0; k < 3; ++k) pts.push_back(HeisenbergPoint{std::vector<cplx>(n, zs[k]), xs[k]});
  return pts;
}

int cmd_kernel_table(const Options& o) {
  const RunConfig c = load(o);
  const auto pts = c.table_points ? *c.table_points : default_table_points(c.sig.n());
  std::string out = "x,y,epsilon,re,im,abs,route,abs_disagreement\n";
  for (const auto& x : pts)
    for (const auto& y : pts)
      for (double eps : c.table_epsilons) {
        const cplx kc = szego_kernel_scalar(x, y, c.sig, PhaseChoice::minus, eps);
        const cplx kq = fio_quadrature(x, y, c.sig, PhaseChoice::minus, eps).value;
        const double dis = std::abs(kc - kq);
        for (const auto& [route, k] : {std::pair<const char*, cplx>{"closed-form", kc}, {"fio-quadrature", kq}})
          out += point_cell(x) + "," + point_cell(y) + "," + num(eps) + "," + num(k.real()) + "," + num(k.imag()) + "," +
                 num(std::abs(k)) + "," + route + "," + num(dis) + "\n";
      }
  emit(o, out);
  return exit_ok;
}

int cmd_project(const Options& o) {
  if (o.out.empty()) throw UsageError("project: --out is required");
  const FieldFormat fmt = field_format_from_string(o.format);
  const RunConfig c = load(o);
  const FormField u = read_form_file(o.input);
  if (c.sig.n() != u.grid.n)
    throw UsageError("signature has n=" + std::to_string(c.sig.n()) + " but the field has n=" + std::to_string(u.grid.n));
  PipelineOptions opt;
  opt.jobs = c.jobs;
  opt.truncation_budget = c.tol("gaussian_truncation");
  const FormField su = szego_project_form(u, c.sig, opt);
  const FormField ssu = szego_project_form(su, c.sig, opt);

  std::ostringstream rep;
  char buf[256];
  rep << "degree " << u.q << "\n";
  const auto why = vanishing_reason(u.q, c.sig);
  rep << "vanishing " << (why ? *why : std::string("no")) << "\n";
  const bool fd = u.grid.rule == QuadratureRule::uniform_trapezoid && u.grid.spatial_points >= 2 * boundary_band + 1;
  for (const auto& [J, f] : su.components) {
    const double nin = norm(u.get(J)), nout = norm(f);
    const double change = nin > 0 ? norm(f - u.get(J)) / nin : 0.0;
    std::snprintf(buf, sizeof buf, "component %s norm_in=%.6e norm_out=%.6e relative_change=%.6e", J.str().c_str(), nin,
                  nout, change);
    rep << buf;
    if (fd) {
      std::snprintf(buf, sizeof buf, " cr_residual=%.6e", cr_residual(f, J, c.sig).relative);
      rep << buf;
    }
    rep << "\n";
  }
  const double nsu = norm(su);
  std::snprintf(buf, sizeof buf, "idempotency_gap %.6e\n", nsu > 0 ? norm(ssu - su) / nsu : 0.0);
  rep << buf;
  write_form_file(o.out, su, fmt);
  std::cout << rep.str();
  return exit_ok;
}

int cmd_verify(const Options& o) {
  const RunConfig c = load(o);
  const Report rep = run_verification(c, c.jobs);
  emit(o, rep.str());
  if (!o.out.empty()) std::cout << rep.str();
  return rep.ok() ? exit_ok : exit_verify;
}

int cmd_make_packet(const Options& o) {
  const RunConfig c = load(o);
  FormField u(c.degree, c.grid);
  std::vector<PacketEntry> packets = c.packets;
  if (packets.empty()) {
    // One packet on the distinguished component of this degree.
    PacketEntry e;
    if (c.degree == c.sig.n_minus()) {
      e.component = j_minus(c.sig);
      e.spec.sign = 1;
    } else if (c.degree == c.sig.n_plus()) {
      e.component = j_plus(c.sig);
      e.spec.sign = -1;
    } else {
      throw UsageError("make-packet: no packet configured and degree " + std::to_string(c.degree) +
                       " carries no Hardy component");
    }
    e.spec.alpha.assign(c.sig.n(), 0);
    e.spec.conjugated_axes = e.component.entries();
    e.spec.t_low = c.grid.freq_max / 6.0;
    e.spec.t_high = c.grid.freq_max * 5.0 / 6.0;
    packets.push_back(e);
  }
  for (const auto& p : packets) {
    if (p.component.size() != c.degree)
      throw UsageError("make-packet: component " + p.component.str() + " does not have degree " + std::to_string(c.degree));
    const ScalarField f = make_wave_packet(p.spec, c.sig, c.grid);
    u.set(p.component, u.get(p.component) + f);
  }
  const FieldFormat fmt = field_format_from_string(o.format);
  if (o.out.empty()) {
    write_form(std::cout, u, fmt);
    return exit_ok;
  }
  write_form_file(o.out, u, fmt);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Szego projector toolkit"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool with_format, bool with_jobs) {
    sub->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output path (default: stdout)");
    if (with_format)
      sub->add_option("--format", o.format, "field file format")->check(CLI::IsMember({"csv", "binary"}));
    if (with_jobs) sub->add_option("--jobs", o.jobs, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  };
  auto* table = app.add_subcommand("kernel-table", "tabulate the closed-form kernel against its oscillatory integral");
  common(table, false, false);
  auto* project = app.add_subcommand("project", "apply the form projector to a field file");
  common(project, true, true);
  project->add_option("input", o.input, "input field file")->required();
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  common(verify, false, true);
  auto* packet = app.add_subcommand("make-packet", "write a wave-packet form");
  common(packet, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*table) return cmd_kernel_table(o);
    if (*project) return cmd_project(o);
    if (*verify) return cmd_verify(o);
    if (*packet) return cmd_make_packet(o);
  } catch (const BudgetError& e) {
    std::cerr << "szego: " << e.what() << "\n";
    return exit_budget;
  } catch (const std::exception& e) {
    std::cerr << "szego: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
