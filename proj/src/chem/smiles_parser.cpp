#include "phenogen/chem/smiles_parser.h"

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phenogen/error.h"

namespace phenogen::chem {
namespace {

// Elements accepted inside brackets.
constexpr std::array<std::string_view, 13> kBracketElements = {
    "H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Se", "Br", "I"};
constexpr std::array<std::string_view, 8> kAromaticBracket = {"b", "c", "n", "o", "p", "s", "se", "as"};

bool is_bracket_element(std::string_view s) {
  for (auto e : kBracketElements) {
    if (e == s) return true;
  }
  return false;
}

bool is_aromatic_bracket(std::string_view s) {
  for (auto e : kAromaticBracket) {
    if (e == s) return true;
  }
  return false;
}

struct PendingBond {
  BondOrder order = BondOrder::kSingle;
};

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
};

struct BranchFrame {
  int atom;
  int atoms_at_open;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MolGraph run() {
    if (text_.empty()) fail("empty SMILES");
    while (pos_ < text_.size()) step();
    if (pending_) fail("dangling bond at end of input");
    if (!branches_.empty()) fail("unbalanced '(' opened at atom " + std::to_string(branches_.back().atom));
    if (!rings_.empty()) fail("unclosed ring bond " + std::to_string(rings_.begin()->first));
    if (prev_ < 0) fail("expected an atom at end of input");
    g_.rings = find_rings(g_.atom_count(), g_.bonds);
    return std::move(g_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::kSyntax, what + " (position " + std::to_string(pos_) + " in '" + std::string(text_) + "')");
  }

  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '(': open_branch(); return;
      case ')': close_branch(); return;
      case '.': dot(); return;
      case '-': bond(BondOrder::kSingle); return;
      case '=': bond(BondOrder::kDouble); return;
      case '#': bond(BondOrder::kTriple); return;
      case ':': bond(BondOrder::kAromatic); return;
      case '/':
      case '\\': bond(BondOrder::kSingle); return;
      case '%': {
        if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
            !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
          fail("'%' must be followed by two digits");
        }
        int label = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        ring_bond(label);
        pos_ += 3;
        return;
      }
      case '[': bracket_atom(); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ring_bond(c - '0');
      ++pos_;
      return;
    }
    organic_atom();
  }

  void open_branch() {
    if (prev_ < 0 || after_branch_start_) fail("'(' without a preceding atom");
    if (pending_) fail("bond before '('");
    branches_.push_back({prev_, g_.atom_count()});
    after_branch_start_ = true;
    after_branch_close_ = false;
    ++pos_;
  }

  void close_branch() {
    if (branches_.empty()) fail("unbalanced ')'");
    if (pending_) fail("dangling bond before ')'");
    if (g_.atom_count() == branches_.back().atoms_at_open || prev_ < 0) fail("empty branch");
    prev_ = branches_.back().atom;
    branches_.pop_back();
    after_branch_start_ = false;
    after_branch_close_ = true;
    ++pos_;
  }

  void dot() {
    if (prev_ < 0 || pending_) fail("'.' must follow an atom");
    prev_ = -1;
    after_branch_start_ = false;
    after_branch_close_ = false;
    ++pos_;
  }

  void bond(BondOrder order) {
    if (prev_ < 0 && !after_branch_start_) fail("bond without a preceding atom");
    if (pending_) fail("two consecutive bond symbols");
    pending_ = PendingBond{order};
    ++pos_;
  }

  void ring_bond(int label) {
    if (prev_ < 0 || after_branch_start_) fail("ring bond without a preceding atom");
    if (after_branch_close_) fail("ring bond after a branch");
    std::optional<BondOrder> order;
    if (pending_) order = pending_->order;
    pending_.reset();
    auto it = rings_.find(label);
    if (it == rings_.end()) {
      rings_.emplace(label, RingOpen{prev_, order});
      return;
    }
    RingOpen open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) fail("ring bond " + std::to_string(label) + " closes on its own atom");
    if (open.order && order && *open.order != *order) fail("conflicting ring bond orders");
    BondOrder resolved = open.order ? *open.order : (order ? *order : default_order(open.atom, prev_));
    add_bond(open.atom, prev_, resolved);
  }

  BondOrder default_order(int a, int b) const {
    return g_.atoms[a].aromatic && g_.atoms[b].aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
  }

  void add_bond(int a, int b, BondOrder order) {
    if (g_.find_bond(a, b) >= 0) fail("duplicate bond between atoms " + std::to_string(a) + " and " + std::to_string(b));
    g_.bonds.push_back({a, b, order});
  }

  void attach(Atom atom) {
    g_.atoms.push_back(std::move(atom));
    const int idx = g_.atom_count() - 1;
    const int from = after_branch_start_ ? branches_.back().atom : prev_;
    if (from >= 0) {
      add_bond(from, idx, pending_ ? pending_->order : default_order(from, idx));
    } else if (pending_) {
      fail("bond without a preceding atom");
    }
    pending_.reset();
    prev_ = idx;
    after_branch_start_ = false;
    after_branch_close_ = false;
  }

  void organic_atom() {
    const char c = text_[pos_];
    Atom atom;
    std::size_t len = 1;
    switch (c) {
      case 'C':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
          atom.element = "Cl";
          len = 2;
        } else {
          atom.element = "C";
        }
        break;
      case 'B':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
          atom.element = "Br";
          len = 2;
        } else {
          atom.element = "B";
        }
        break;
      case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
        atom.element = std::string(1, c);
        break;
      case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
        atom.element = std::string(1, static_cast<char>(std::toupper(c)));
        atom.aromatic = true;
        break;
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
    pos_ += len;
    attach(std::move(atom));
  }

  void bracket_atom() {
    const std::size_t close = text_.find(']', pos_);
    if (close == std::string_view::npos) fail("unterminated bracket atom");
    std::string_view body = text_.substr(pos_ + 1, close - pos_ - 1);
    std::size_t i = 0;
    auto malformed = [&](const std::string& why) { fail("malformed bracket atom [" + std::string(body) + "]: " + why); };
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;  // isotope
    if (i >= body.size()) malformed("missing element");
    Atom atom;
    atom.bracket = true;
    if (std::isupper(static_cast<unsigned char>(body[i]))) {
      if (i + 1 < body.size() && std::islower(static_cast<unsigned char>(body[i + 1])) &&
          is_bracket_element(body.substr(i, 2))) {
        atom.element = std::string(body.substr(i, 2));
        i += 2;
      } else if (is_bracket_element(body.substr(i, 1))) {
        atom.element = std::string(body.substr(i, 1));
        i += 1;
      } else {
        malformed("unknown element");
      }
    } else if (std::islower(static_cast<unsigned char>(body[i]))) {
      std::string_view sym;
      if (i + 1 < body.size() && is_aromatic_bracket(body.substr(i, 2))) {
        sym = body.substr(i, 2);
      } else if (is_aromatic_bracket(body.substr(i, 1))) {
        sym = body.substr(i, 1);
      } else {
        malformed("unknown aromatic element");
      }
      atom.element = std::string(sym);
      atom.element[0] = static_cast<char>(std::toupper(atom.element[0]));
      atom.aromatic = true;
      i += sym.size();
    } else {
      malformed("missing element");
    }
    // chirality: @, @@, or @ followed by a class tag such as TH1
    if (i < body.size() && body[i] == '@') {
      ++i;
      if (i < body.size() && body[i] == '@') {
        ++i;
      } else {
        while (i < body.size() && std::isupper(static_cast<unsigned char>(body[i])) && body[i] != 'H') ++i;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
      }
    }
    if (i < body.size() && body[i] == 'H') {
      ++i;
      atom.explicit_h = 1;
      if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        atom.explicit_h = body[i] - '0';
        ++i;
      }
    }
    if (i < body.size() && (body[i] == '+' || body[i] == '-')) {
      const char sign = body[i];
      int magnitude = 1;
      ++i;
      if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        magnitude = 0;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
          magnitude = magnitude * 10 + (body[i] - '0');
          ++i;
          if (magnitude > 15) malformed("charge out of range");
        }
      } else {
        while (i < body.size() && body[i] == sign) {
          ++magnitude;
          ++i;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }
    if (i < body.size() && body[i] == ':') {
      ++i;
      const std::size_t digits = i;
      while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
      if (i == digits) malformed("empty atom class");
    }
    if (i != body.size()) malformed("unexpected '" + std::string(body.substr(i)) + "'");
    pos_ = close + 1;
    attach(std::move(atom));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  MolGraph g_;
  int prev_ = -1;
  std::optional<PendingBond> pending_;
  std::vector<BranchFrame> branches_;
  std::map<int, RingOpen> rings_;
  bool after_branch_start_ = false;
  bool after_branch_close_ = false;
};

}  // namespace

MolGraph parse_smiles(std::string_view smiles) { return Parser(smiles).run(); }

}  // namespace phenogen::chem
