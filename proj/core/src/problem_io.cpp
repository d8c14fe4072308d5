#include "timepar/errors.hpp"
#include "timepar/model_problems.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace timepar {

namespace {

constexpr const char* kMagic = "%%timepar-problem";
constexpr int kVersion = 1;

void write_matrix(std::ostream& out, const char* tag, const SpatialMatrix& m)
{
    const auto entries = m.upper_entries();
    out << tag << ' ' << entries.size() << '\n';
    for (const auto& e : entries) {
        out << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
    }
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void expect(const std::string& keyword)
    {
        const std::string got = word();
        if (got != keyword) {
            throw InputError("read_problem: expected '" + keyword + "', found '" + got + "'");
        }
    }

    std::string word()
    {
        std::string w;
        if (!(in_ >> w)) {
            throw InputError("read_problem: unexpected end of input");
        }
        return w;
    }

    template <typename T>
    T number(const char* what)
    {
        T value{};
        if (!(in_ >> value)) {
            throw InputError(std::string("read_problem: could not parse ") + what);
        }
        return value;
    }

    SpatialMatrix matrix(const std::string& tag, Index dim)
    {
        expect(tag);
        const auto count = number<std::size_t>("entry count");
        std::vector<Entry> entries;
        entries.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto r = number<Index>("row index");
            const auto c = number<Index>("column index");
            const auto v = number<double>("matrix value");
            entries.push_back({r - 1, c - 1, v});
        }
        return SpatialMatrix::from_entries(dim, entries);
    }

    SpatialVector vector(Index dim)
    {
        SpatialVector v(dim);
        for (Index i = 0; i < dim; ++i) {
            v[i] = number<double>("vector entry");
        }
        return v;
    }

private:
    std::istream& in_;
};

}  // namespace

void write_problem(std::ostream& out, const ProblemSpec& spec)
{
    spec.validate();
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);

    std::map<const SpatialMatrix*, int> base_ids;
    std::vector<const SpatialMatrix*> bases;
    auto base_id = [&](const StepOperator& op) {
        auto [it, inserted] = base_ids.emplace(op.base.get(), static_cast<int>(bases.size()));
        if (inserted) {
            bases.push_back(op.base.get());
        }
        return it->second;
    };
    std::vector<int> step_ids;
    for (const auto& op : spec.stiffness) {
        step_ids.push_back(base_id(op));
    }
    const int ref_id = base_id(spec.reference);

    out << kMagic << ' ' << kVersion << '\n';
    out << "dim " << spec.dim() << " steps " << spec.steps() << '\n';
    out << "tau_ref " << spec.tau_ref << " alpha " << spec.alpha << " seed " << spec.seed << '\n';
    if (spec.mesh) {
        out << "mesh " << static_cast<int>(spec.mesh->space) << ' ' << spec.mesh->cells << '\n';
    } else {
        out << "mesh none\n";
    }
    out << "nodes";
    for (double t : spec.grid.nodes()) {
        out << ' ' << t;
    }
    out << '\n';
    write_matrix(out, "mass", spec.mass);
    out << "bases " << bases.size() << '\n';
    for (const auto* b : bases) {
        write_matrix(out, "base", *b);
    }
    out << "stiffness\n";
    for (std::size_t n = 0; n < step_ids.size(); ++n) {
        out << step_ids[n] << ' ' << spec.stiffness[n].scale << '\n';
    }
    out << "reference " << ref_id << ' ' << spec.reference.scale << '\n';
    out << "initial\n";
    for (Index i = 0; i < spec.dim(); ++i) {
        out << spec.initial[i] << '\n';
    }
    out << "load\n";
    for (const auto& f : spec.load) {
        for (Index i = 0; i < spec.dim(); ++i) {
            out << f[i] << '\n';
        }
    }
    out.precision(old_precision);
}

ProblemSpec read_problem(std::istream& in)
{
    Reader r(in);
    r.expect(kMagic);
    if (const int version = r.number<int>("version"); version != kVersion) {
        throw InputError("read_problem: unsupported format version " + std::to_string(version));
    }
    r.expect("dim");
    const auto dim = r.number<Index>("dim");
    r.expect("steps");
    const auto steps = r.number<int>("steps");
    if (dim < 1 || steps < 1) {
        throw InputError("read_problem: dim and steps must be positive");
    }

    ProblemSpec spec;
    r.expect("tau_ref");
    spec.tau_ref = r.number<double>("tau_ref");
    r.expect("alpha");
    spec.alpha = r.number<double>("alpha");
    r.expect("seed");
    spec.seed = r.number<std::uint64_t>("seed");

    r.expect("mesh");
    const std::string mesh_word = r.word();
    if (mesh_word != "none") {
        const int space = std::stoi(mesh_word);
        if (space != 1 && space != 2) {
            throw InputError("read_problem: mesh dimension must be 1 or 2");
        }
        spec.mesh = MeshInfo{static_cast<SpaceDim>(space), r.number<int>("mesh cells")};
    }

    r.expect("nodes");
    std::vector<double> nodes(static_cast<std::size_t>(steps) + 1);
    for (auto& t : nodes) {
        t = r.number<double>("time node");
    }
    spec.grid = TimeGrid(std::move(nodes));

    spec.mass = r.matrix("mass", dim);
    r.expect("bases");
    const auto num_bases = r.number<std::size_t>("base count");
    std::vector<std::shared_ptr<const SpatialMatrix>> bases;
    for (std::size_t b = 0; b < num_bases; ++b) {
        bases.push_back(std::make_shared<const SpatialMatrix>(r.matrix("base", dim)));
    }
    auto lookup = [&](std::size_t id) {
        if (id >= bases.size()) {
            throw InputError("read_problem: base index out of range");
        }
        return bases[id];
    };

    r.expect("stiffness");
    for (int n = 0; n < steps; ++n) {
        const auto id = r.number<std::size_t>("base index");
        spec.stiffness.push_back({lookup(id), r.number<double>("stiffness scale")});
    }
    r.expect("reference");
    const auto ref_id = r.number<std::size_t>("reference base index");
    spec.reference = {lookup(ref_id), r.number<double>("reference scale")};

    r.expect("initial");
    spec.initial = r.vector(dim);
    r.expect("load");
    for (int n = 0; n < steps; ++n) {
        spec.load.push_back(r.vector(dim));
    }
    spec.validate();
    return spec;
}

}  // namespace timepar
