#include "support.hpp"
#include "varqd/config.hpp"
#include "varqd/errors.hpp"
#include "varqd/io.hpp"
#include "varqd/log.hpp"
#include "varqd/potential_parser.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace varqd;
namespace fs = std::filesystem;

namespace {

const char* kFrozen = R"toml(# matched oscillator
kind = "frozen"
principle = "mvp"
hbar = 1.0
potential = "harmonic(k=1)"

[frozen]
delta = 0.7071067811865476
q = [1.0]
p = [0.5]

[grid]
length = 20
points = 256

[integrator]
dt = 0.001
t_final = 1.0
)toml";

ConfigTable with(const std::string& key, const std::string& value) {
  ConfigTable t = ConfigTable::parse(kFrozen);
  t.set(key, parse_config_value(value, key));
  return t;
}

std::string field_of(const ConfigTable& t) {
  try {
    load_scenario(t, ".");
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "varqd_test_config";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("TOML subset") {
  const auto t = ConfigTable::parse(kFrozen);
  CHECK(t.string("kind") == "frozen");
  CHECK(t.number("hbar") == 1.0);
  CHECK(t.integer("grid.points") == 256);
  CHECK(t.array("frozen.q") == std::vector<double>{1.0});
  CHECK(t.number("grid.length") == 20.0);
  CHECK(t.boolean("integrator.estimate_error", false) == false);
  CHECK(t.number("missing", 3.5) == 3.5);
  CHECK_THROWS_AS(t.number("kind"), ValidationError);
  CHECK_THROWS_AS(t.integer("frozen.delta"), ValidationError);
  const auto u = ConfigTable::parse("a = [1, -2.5e-1 , 3]  # trailing\nb = true\nc = \"x # y\"\n");
  CHECK(u.array("a") == std::vector<double>{1.0, -0.25, 3.0});
  CHECK(u.boolean("b", false));
  CHECK(u.string("c") == "x # y");
  CHECK_THROWS_AS(ConfigTable::parse("a = 1\na = 2\n"), ValidationError);
  CHECK_THROWS_AS(ConfigTable::parse("[grid\n"), ValidationError);
  CHECK_THROWS_AS(ConfigTable::parse("a = [1, x]\n"), ValidationError);
  CHECK_THROWS_AS(ConfigTable::parse("a = \"open\n"), ValidationError);
  CHECK_THROWS_AS(ConfigTable::parse("just text\n"), ValidationError);
}

TEST_CASE("canonical text and config hashes") {
  const auto a = ConfigTable::parse(kFrozen);
  const auto b = ConfigTable::parse(std::string("# another comment\n") + kFrozen);
  CHECK(a.canonical() == b.canonical());
  CHECK(ConfigTable::parse(a.canonical()).canonical() == a.canonical());
  const auto sa = load_scenario(a, ".");
  CHECK(sa.config_hash() == load_scenario(b, ".").config_hash());
  CHECK(sa.config_hash() != load_scenario(with("integrator.dt", "0.002"), ".").config_hash());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("physics hash ignores run settings") {
  const auto base = load_scenario(ConfigTable::parse(kFrozen), ".");
  CHECK(base.physics_hash() == load_scenario(with("integrator.dt", "0.01"), ".").physics_hash());
  CHECK(base.physics_hash() == load_scenario(with("kind", "\"reference\""), ".").physics_hash());
  CHECK(base.physics_hash() != load_scenario(with("potential", "\"harmonic(k=2)\""), ".").physics_hash());
  CHECK(base.physics_hash() != load_scenario(with("frozen.p", "[0.4]"), ".").physics_hash());
  CHECK(base.physics_hash() != load_scenario(with("grid.points", "128"), ".").physics_hash());
}

TEST_CASE("scenario validation names the field") {
  CHECK(field_of(ConfigTable::parse(kFrozen)).empty());
  CHECK(field_of(with("frozen.delta", "0")) == "frozen.delta");
  CHECK(field_of(with("frozen.delta", "-1")) == "frozen.delta");
  CHECK(field_of(with("hbar", "0")) == "hbar");
  CHECK(field_of(with("grid.points", "100")) == "grid.points");
  CHECK(field_of(with("frozen.q", "[10.0]")) == "frozen.q");
  CHECK(field_of(with("frozen.q", "[0, 0, 0]")) == "frozen.q");
  CHECK(field_of(with("frozen.p", "[0, 0]")) == "frozen.p");
  CHECK(field_of(with("kind", "\"thawed\"")) == "kind");
  CHECK(field_of(with("principle", "\"dirac\"")) == "principle");
  CHECK(field_of(with("integrator.method", "\"euler\"")) == "integrator.method");
  CHECK(field_of(with("integrator.dt", "0")) == "integrator.dt");
  CHECK(field_of(with("potential", "\"harmonic(q=1)\"")) == "potential");
  CHECK(field_of(with("potential", "\"linear(1, 2)\"")) == "potential");
  CHECK(field_of(with("colour", "\"blue\"")) == "colour");
  CHECK(field_of(with("grid.max_points", "128")) == "grid.points");
  CHECK(field_of(with("output.stride", "0")) == "output.stride");
  ConfigTable ref = with("reference.enabled", "true");
  ref.set("reference.dt", 0.0003);
  CHECK(field_of(ref) == "reference.dt");
  ref.set("reference.dt", 0.00025);
  CHECK(field_of(ref).empty());
  ref.set("integrator.method", std::string("rk45"));
  CHECK(field_of(ref) == "reference.enabled");
}

TEST_CASE("Hartree scenarios") {
  const char* text = R"toml(kind = "hartree"
potential = "sum(harmonic(k=1), pair(lambda=0.5))"
[hartree]
centers = [-1, 1]
widths = [0.8, 0.9]
[grid]
length = 20
points = 64
[integrator]
dt = 0.01
t_final = 1
)toml";
  const auto t = ConfigTable::parse(text);
  const auto sc = load_scenario(t, ".");
  CHECK(sc.coordinates() == 2);
  CHECK(sc.grid().dimension() == 1);
  CHECK(sc.reference_grid().dimension() == 2);
  const auto s = sc.hartree_state();
  CHECK(s.count() == 2);
  CHECK(std::abs(norm(s.particles[1]) - 1.0) <= 1e-12);
  CHECK(std::abs(norm(sc.initial_wavefunction()) - 1.0) <= 1e-10);
  ConfigTable one = t;
  one.set("hartree.centers", std::vector<double>{0.0});
  one.set("hartree.widths", std::vector<double>{1.0});
  CHECK(field_of(one) == "hartree.centers");
  ConfigTable five = t;
  five.set("hartree.centers", std::vector<double>(5, 0.0));
  five.set("hartree.widths", std::vector<double>(5, 1.0));
  CHECK(field_of(five) == "hartree.centers");
  ConfigTable wide = t;
  wide.set("hartree.widths", std::vector<double>{0.8, -1.0});
  CHECK(field_of(wide) == "hartree.widths");
  ConfigTable edge = t;
  edge.set("hartree.centers", std::vector<double>{-1.0, 8.0});
  CHECK(field_of(edge) == "hartree.centers");
  ConfigTable three = t;
  three.set("hartree.centers", std::vector<double>{-1.0, 0.0, 1.0});
  three.set("hartree.widths", std::vector<double>{0.8, 0.8, 0.8});
  three.set("reference.enabled", true);
  CHECK(field_of(three) == "reference.enabled");
}

TEST_CASE("potential grammar") {
  for (const std::string text :
       {"harmonic(k=2)", "quartic(k2=1,k4=0.10000000000000001)", "morse(D=2,a=0.5,x0=-1)",
        "doublewell(a=0.050000000000000003,b=1)", "pair(lambda=0.25)", "constant(c=3)", "linear(0.5,-1)",
        "separable(harmonic(k=1),quartic(k2=1,k4=0.5))", "sum(harmonic(k=1),pair(lambda=0.5))"}) {
    const auto v = parse_potential(text);
    CHECK(v.describe() == text);
    CHECK(parse_potential(v.describe()).describe() == v.describe());
  }
  CHECK(parse_potential(" harmonic ( k = 2 ) ").describe() == "harmonic(k=2)");
  CHECK(parse_potential("harmonic()").describe() == "harmonic(k=1)");
  CHECK_THROWS_AS(parse_potential("harmonic(k=1"), ValidationError);
  CHECK_THROWS_AS(parse_potential("wobble(k=1)"), ValidationError);
  CHECK_THROWS_AS(parse_potential("harmonic(k=1) extra"), ValidationError);
  CHECK_THROWS_AS(parse_potential("separable(pair(lambda=1))"), ValidationError);
  CHECK_THROWS_AS(parse_potential("custom(file=\"x.txt\")"), ValidationError);
}

TEST_CASE("tabulated potentials") {
  const Grid g(1, 20.0, 16);
  const auto path = scratch("table.txt");
  {
    std::ofstream out(path);
    out << "# harmonic\n";
    for (int j = 0; j < 16; ++j) out << 0.5 * g.coordinate(j) * g.coordinate(j) << (j % 4 == 3 ? "\n" : " ");
  }
  PotentialContext ctx;
  ctx.grid = g;
  ctx.base_directory = path.parent_path();
  const auto v = parse_potential("custom(file=\"table.txt\")", ctx);
  CHECK_FALSE(v.analytic());
  const auto t = v.tabulate(g);
  CHECK(t[3] == doctest::Approx(0.5 * g.coordinate(3) * g.coordinate(3)));
  std::ofstream(scratch("short.txt")) << "1 2 3\n";
  CHECK_THROWS_AS(parse_potential("custom(file=\"short.txt\")", ctx), ValidationError);
}

TEST_CASE("number formatting round-trips") {
  test::Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform(-60, 60)));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("snapshot files") {
  const Grid g(2, 10.0, 16);
  const auto psi = test::bump(g);
  SnapshotHeader h;
  h.time = 1.25;
  h.hbar = 0.5;
  h.physics_hash = 0x1234567890abcdefULL;
  h.particle = 1;
  h.particle_count = 2;
  h.sample = 42;
  const auto path = scratch("snap.bin");
  write_snapshot(path, psi, h);
  CHECK(fs::file_size(path) == kSnapshotHeaderBytes + 16 * g.size());
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 8) == "VARQDWF1");
  const auto back = read_snapshot(path);
  CHECK(back.header.time == 1.25);
  CHECK(back.header.physics_hash == h.physics_hash);
  CHECK(back.header.sample == 42);
  CHECK(back.header.particle == 1);
  CHECK(back.psi.grid() == g);
  CHECK(norm(back.psi - psi) == 0.0);
  std::ofstream(scratch("bad.bin"), std::ios::binary) << "NOTASNAPSHOT";
  CHECK_THROWS(read_snapshot(scratch("bad.bin")));
}

TEST_CASE("CSV tables") {
  CsvTable t;
  t.config_hash = "00ff";
  t.header = {"t", "x"};
  t.rows = {{0.0, 0.1}, {0.5, -1e-300}};
  const auto path = scratch("t.csv");
  write_csv(path, t);
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "# config_hash: 00ff");
  const auto back = read_csv(path);
  CHECK(back.config_hash == "00ff");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("x") == 1);
  CHECK_THROWS_AS(back.column("y"), ValidationError);
}

TEST_CASE("stability warning counts the potential") {
  std::vector<std::string> seen;
  auto previous = set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  std::string text = R"toml(kind = "hartree"
potential = "separable(harmonic(k=1), quartic(k2=1, k4=0.1))"
[hartree]
centers = [-1, 1]
widths = [0.8, 0.9]
[grid]
length = 20
points = 64
[integrator]
dt = 0.01
t_final = 1
)toml";
  // Kinetic alone gives dt * E = 0.5; the quartic wall adds 3.
  load_scenario(ConfigTable::parse(text), ".");
  CHECK(seen.size() == 1);
  text.replace(text.find("length = 20"), 11, "length = 12");
  load_scenario(ConfigTable::parse(text), ".");
  CHECK(seen.size() == 1);
  set_warning_sink(previous);
}
