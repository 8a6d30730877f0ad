#include "kdict/dictionary_io.hpp"

#include "kdict/csv.hpp"
#include "kdict/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace kdict {

namespace {

constexpr const char* kMagic = "kdict-dictionary";
constexpr int kFormatVersion = 1;

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-blank, non-comment line split on whitespace; empty at EOF.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      const auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      return tokens;
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("dictionary file line " + std::to_string(line_no_) +
                     ": " + what);
  }

  std::vector<std::string> expect(const std::string& keyword,
                                  std::size_t min_tokens) {
    auto tokens = next();
    if (tokens.empty()) fail("unexpected end of file, expected '" + keyword + "'");
    if (tokens[0] != keyword) {
      fail("expected '" + keyword + "', found '" + tokens[0] + "'");
    }
    if (tokens.size() < min_tokens) fail("truncated '" + keyword + "' record");
    return tokens;
  }

  double number(const std::string& text) {
    try {
      return parse_double(text);
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }

  std::size_t count(const std::string& text) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      fail("not a non-negative integer: '" + text + "'");
    }
  }

  // Value of "key=value" tokens after position 1.
  std::string option(const std::vector<std::string>& tokens,
                     const std::string& key, bool required = true) {
    const std::string prefix = key + "=";
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      if (tokens[i].rfind(prefix, 0) == 0) return tokens[i].substr(prefix.size());
    }
    if (required) fail("missing '" + key + "='");
    return {};
  }

 private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_dictionary(std::ostream& os, const Dictionary& dict) {
  os << kMagic << ' ' << kFormatVersion << '\n';
  const auto& k = dict.kernel();
  os << "kernel " << to_string(k.family());
  switch (k.family()) {
    case KernelFamily::linear:
      break;
    case KernelFamily::polynomial:
      os << " degree=" << k.degree() << " offset=" << format_double(k.offset());
      break;
    case KernelFamily::gaussian:
      os << " sigma=" << format_double(k.sigma());
      break;
  }
  os << '\n';
  const auto& c = dict.criterion();
  os << "criterion " << to_string(c.kind)
     << " threshold=" << format_double(c.threshold);
  if (c.max_atoms) os << " max_atoms=" << *c.max_atoms;
  os << '\n';
  os << "dim " << dict.dimension() << '\n';
  os << "atoms " << dict.size() << '\n';
  for (const auto& atom : dict.atoms()) {
    for (Eigen::Index i = 0; i < atom.size(); ++i) {
      if (i) os << ' ';
      os << format_double(atom(i));
    }
    os << '\n';
  }
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot write " + path.string());
  write_dictionary(os, dict);
}

Dictionary read_dictionary(std::istream& is) {
  LineReader in(is);

  auto header = in.expect(kMagic, 2);
  if (header[1] != std::to_string(kFormatVersion)) {
    in.fail("unsupported format version " + header[1]);
  }

  auto ktoks = in.expect("kernel", 2);
  KernelSpec kernel = KernelSpec::linear();
  try {
    switch (parse_kernel_family(ktoks[1])) {
      case KernelFamily::linear:
        break;
      case KernelFamily::polynomial:
        kernel = KernelSpec::polynomial(
            static_cast<int>(in.count(in.option(ktoks, "degree"))),
            in.number(in.option(ktoks, "offset")));
        break;
      case KernelFamily::gaussian:
        kernel = KernelSpec::gaussian(in.number(in.option(ktoks, "sigma")));
        break;
    }
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }

  auto ctoks = in.expect("criterion", 3);
  CriterionConfig criterion;
  try {
    criterion.kind = parse_criterion(ctoks[1]);
    criterion.threshold = in.number(in.option(ctoks, "threshold"));
    const auto cap = in.option(ctoks, "max_atoms", false);
    if (!cap.empty()) criterion.max_atoms = in.count(cap);
    criterion.validate();
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }

  const auto dim = in.count(in.expect("dim", 2)[1]);
  const auto m = in.count(in.expect("atoms", 2)[1]);

  std::vector<Vector> atoms;
  atoms.reserve(m);
  for (std::size_t a = 0; a < m; ++a) {
    auto tokens = in.next();
    if (tokens.empty()) in.fail("expected " + std::to_string(m) + " atoms");
    if (tokens.size() != dim) {
      in.fail("atom has " + std::to_string(tokens.size()) +
              " components, expected " + std::to_string(dim));
    }
    Vector x(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      x(static_cast<Eigen::Index>(i)) = in.number(tokens[i]);
    }
    atoms.push_back(std::move(x));
  }
  if (!in.next().empty()) in.fail("trailing content after atoms");

  try {
    return Dictionary::from_atoms(kernel, criterion, std::move(atoms));
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path.string());
  return read_dictionary(is);
}

}  // namespace kdict
