#include "cseer/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cseer {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; byte swapping is not implemented");

namespace {

constexpr char kMagic[5] = {'C', 'S', 'E', 'E', 'R'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1'000'000;
constexpr std::uint64_t kMaxTotalParams = 1'000'000'000;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated model file");
    return v;
}

double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated model file");
    return v;
}

std::string read_string(std::istream& in) {
    std::uint32_t len = read_u32(in);
    if (len > kMaxDim) throw std::runtime_error("dim overflow in model file");
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw std::runtime_error("truncated model file");
    return s;
}

// Matrices are stored row-major; Eigen's default layout is column-major.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64(out, w(r, c));
}

void read_matrix(std::istream& in, Eigen::MatrixXd& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_f64(in);
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(out, v[i]);
}

void read_vector(std::istream& in, Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = read_f64(in);
}

}  // namespace

void save_model(const Model& model, const Vocabulary& vocab, const std::string& path) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";

    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");

        out.write(kMagic, sizeof kMagic);
        write_u32(out, kVersion);
        write_u32(out, static_cast<std::uint32_t>(model.kind));
        out.put(model.threshold.goal == Threshold::Goal::A ? 'A' : 'B');
        write_f64(out, model.threshold.cut_points);
        write_u32(out, static_cast<std::uint32_t>(model.dims.n));
        write_u32(out, static_cast<std::uint32_t>(model.dims.m));
        write_u32(out, static_cast<std::uint32_t>(model.dims.k));
        write_u32(out, static_cast<std::uint32_t>(model.dims.d));
        write_u32(out, static_cast<std::uint32_t>(model.dims.d_side));

        for (const auto& course : vocab.courses) {
            write_string(out, course.department);
            write_u32(out, static_cast<std::uint32_t>(course.number));
            write_string(out, course.subject);
        }
        for (const auto& major : vocab.majors) write_string(out, major);
        for (const auto& category : vocab.letter_categories) write_string(out, category);

        const LstmParams& l = model.lstm;
        write_matrix(out, l.w_fg);
        write_matrix(out, l.w_fh);
        write_vector(out, l.b_f);
        write_matrix(out, l.w_ig);
        write_matrix(out, l.w_ih);
        write_vector(out, l.b_i);
        write_matrix(out, l.w_cg);
        write_matrix(out, l.w_ch);
        write_vector(out, l.b_c);
        write_matrix(out, l.w_og);
        write_matrix(out, l.w_oh);
        write_vector(out, l.b_o);
        write_matrix(out, model.output.w_out);
        write_vector(out, model.output.b_out);
        if (model.output.has_side()) {
            write_matrix(out, model.output.w_side);
            write_vector(out, model.output.b_side);
        }
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    char magic[5] = {};
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("bad magic in '" + path + "'");
    std::uint32_t version = read_u32(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported model file version " + std::to_string(version));

    LoadedModel loaded;
    Model& model = loaded.model;
    std::uint32_t kind = read_u32(in);
    model.kind = model_kind_from_int(static_cast<int>(kind));
    int goal = in.get();
    if (goal != 'A' && goal != 'B') throw std::runtime_error("bad threshold goal in model file");
    model.threshold =
        Threshold::for_goal(goal == 'A' ? Threshold::Goal::A : Threshold::Goal::B);
    model.threshold.cut_points = read_f64(in);

    std::uint32_t n = read_u32(in), m = read_u32(in), k = read_u32(in), d = read_u32(in),
                  d_side = read_u32(in);
    if (n == 0 || m == 0 || k == 0 || d == 0 || n > kMaxDim || m > kMaxDim || k > kMaxDim ||
        d > kMaxDim || d_side > kMaxDim)
        throw std::runtime_error("dim overflow in model file");
    std::uint64_t grade_dim = static_cast<std::uint64_t>(m + 2) * n;
    std::uint64_t in_dim = grade_dim + (model.kind == ModelKind::CoEnrollment ? n : 0) +
                           (model.kind == ModelKind::CoEnrollmentMajors ? k : 0);
    std::uint64_t out_in = d + (model.kind == ModelKind::CoEnrollmentMajors ? d_side : 0);
    std::uint64_t total = 4 * (in_dim * d + static_cast<std::uint64_t>(d) * d + d) +
                          grade_dim * out_in + grade_dim +
                          (model.kind == ModelKind::CoEnrollmentMajors
                               ? static_cast<std::uint64_t>(d_side) * n + d_side
                               : 0);
    if (total > kMaxTotalParams) throw std::runtime_error("dim overflow in model file");
    model.dims = ModelDims{static_cast<int>(n), static_cast<int>(m), static_cast<int>(k),
                           static_cast<int>(d), static_cast<int>(d_side)};

    Vocabulary& vocab = loaded.vocab;
    vocab.courses.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string dept = read_string(in);
        std::uint32_t number = read_u32(in);
        std::string subject = read_string(in);
        Course course = make_course(dept, static_cast<int>(number));
        course.subject = subject;
        vocab.courses.push_back(std::move(course));
    }
    for (std::uint32_t i = 0; i < k; ++i) vocab.majors.push_back(read_string(in));
    for (std::uint32_t i = 0; i < m; ++i) vocab.letter_categories.push_back(read_string(in));
    vocab.rebuild_lookup();

    auto mat = [&](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd w(rows, cols);
        read_matrix(in, w);
        return w;
    };
    auto vec = [&](Eigen::Index size) {
        Eigen::VectorXd v(size);
        read_vector(in, v);
        return v;
    };

    LstmParams& l = model.lstm;
    Eigen::Index di = static_cast<Eigen::Index>(in_dim);
    Eigen::Index dd = static_cast<Eigen::Index>(d);
    l.w_fg = mat(dd, di);
    l.w_fh = mat(dd, dd);
    l.b_f = vec(dd);
    l.w_ig = mat(dd, di);
    l.w_ih = mat(dd, dd);
    l.b_i = vec(dd);
    l.w_cg = mat(dd, di);
    l.w_ch = mat(dd, dd);
    l.b_c = vec(dd);
    l.w_og = mat(dd, di);
    l.w_oh = mat(dd, dd);
    l.b_o = vec(dd);
    model.output.w_out = mat(static_cast<Eigen::Index>(grade_dim), static_cast<Eigen::Index>(out_in));
    model.output.b_out = vec(static_cast<Eigen::Index>(grade_dim));
    if (model.kind == ModelKind::CoEnrollmentMajors) {
        model.output.w_side = mat(static_cast<Eigen::Index>(d_side), static_cast<Eigen::Index>(n));
        model.output.b_side = vec(static_cast<Eigen::Index>(d_side));
    }

    // Anything left over means the file does not match its own dims.
    in.peek();
    if (!in.eof()) throw std::runtime_error("trailing bytes in model file");
    return loaded;
}

}  // namespace cseer
