#include "schw/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace schw {

struct ScalarField::Node {
    enum Kind { kNum, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg } kind;
    double num = 0.0;
    int var = 0;  // 1-based
    int expo = 0;
    std::shared_ptr<const Node> a, b;

    double eval(std::span<const double> x) const {
        switch (kind) {
            case kNum: return num;
            case kVar: return x[var - 1];
            case kAdd: return a->eval(x) + b->eval(x);
            case kSub: return a->eval(x) - b->eval(x);
            case kMul: return a->eval(x) * b->eval(x);
            case kDiv: {
                double d = b->eval(x);
                if (d == 0.0) throw DomainError("expression: division by zero");
                return a->eval(x) / d;
            }
            case kPow: {
                double v = a->eval(x);
                if (expo >= 0) return std::pow(v, expo);
                if (v == 0.0) throw DomainError("expression: zero base with negative exponent");
                return std::pow(v, expo);
            }
            case kNeg: return -a->eval(x);
        }
        throw Error("unreachable");
    }

    Jet eval_jet(std::span<const double> x, int n, int order) const {
        switch (kind) {
            case kNum: return Jet::constant(n, order, num);
            case kVar: return Jet::variable(n, order, var, x[var - 1]);
            case kAdd: return a->eval_jet(x, n, order) + b->eval_jet(x, n, order);
            case kSub: return a->eval_jet(x, n, order) - b->eval_jet(x, n, order);
            case kMul: return a->eval_jet(x, n, order) * b->eval_jet(x, n, order);
            case kDiv: {
                Jet d = b->eval_jet(x, n, order);
                if (d.value() == 0.0) throw DomainError("expression: division by zero");
                return a->eval_jet(x, n, order) * d.inv();
            }
            case kPow: {
                Jet v = a->eval_jet(x, n, order);
                if (expo >= 0) return v.powi(expo);
                return v.powi(-expo).inv();
            }
            case kNeg: return -a->eval_jet(x, n, order);
        }
        throw Error("unreachable");
    }
};

namespace {

using NodePtr = std::shared_ptr<const ScalarField::Node>;
using Node = ScalarField::Node;

NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::kNum;
    n->num = v;
    return n;
}

NodePtr make_binary(Node::Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
  public:
    Parser(std::string_view s, int dim) : s_(s), dim_(dim) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (eat('+'))
                e = make_binary(Node::kAdd, e, term());
            else if (eat('-'))
                e = make_binary(Node::kSub, e, term());
            else
                return e;
        }
    }

    NodePtr term() {
        NodePtr e = factor();
        for (;;) {
            if (eat('*'))
                e = make_binary(Node::kMul, e, factor());
            else if (eat('/'))
                e = make_binary(Node::kDiv, e, factor());
            else
                return e;
        }
    }

    NodePtr factor() {
        NodePtr b = base();
        if (eat('^')) {
            skip_ws();
            size_t start = pos_;
            bool neg = false;
            if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
                neg = s_[pos_] == '-';
                ++pos_;
            }
            size_t digits = 0;
            long v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                v = v * 10 + (s_[pos_] - '0');
                ++pos_;
                ++digits;
            }
            if (digits == 0) throw ParseError("expected integer exponent", start);
            auto n = std::make_shared<Node>();
            n->kind = Node::kPow;
            n->a = b;
            n->expo = static_cast<int>(neg ? -v : v);
            return n;
        }
        return b;
    }

    NodePtr base() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '-') {
            ++pos_;
            auto n = std::make_shared<Node>();
            n->kind = Node::kNeg;
            n->a = base();
            return n;
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (c == 'x') {
            size_t start = pos_;
            ++pos_;
            long idx = 0;
            size_t digits = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                idx = idx * 10 + (s_[pos_] - '0');
                ++pos_;
                ++digits;
            }
            if (digits == 0) throw ParseError("expected variable index after 'x'", start);
            if (idx < 1 || idx > dim_)
                throw ParseError("unknown variable x" + std::to_string(idx) + " (dim " + std::to_string(dim_) + ")",
                                 start);
            auto n = std::make_shared<Node>();
            n->kind = Node::kVar;
            n->var = static_cast<int>(idx);
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            const char* begin = s_.data() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("malformed number", start);
            pos_ += static_cast<size_t>(end - begin);
            return make_num(v);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view s_;
    int dim_;
    size_t pos_ = 0;
};

}  // namespace

ScalarField ScalarField::parse(std::string_view src, int dim) {
    if (dim < 1 || dim > kMaxJetDim) throw DimensionError("field dimension out of range");
    ScalarField f;
    f.root_ = Parser(src, dim).run();
    f.dim_ = dim;
    f.src_ = std::string(src);
    return f;
}

ScalarField ScalarField::constant(int dim, double v) {
    ScalarField f;
    f.root_ = make_num(v);
    f.dim_ = dim;
    f.src_ = std::to_string(v);
    return f;
}

bool ScalarField::is_zero() const {
    if (!root_) return true;
    return root_->kind == Node::kNum && root_->num == 0.0;
}

double ScalarField::eval(std::span<const double> x) const {
    if (!root_) return 0.0;
    if (static_cast<int>(x.size()) != dim_) throw DimensionError("field evaluated at wrong-dimension point");
    return root_->eval(x);
}

Jet ScalarField::eval_jet(std::span<const double> x, int order) const {
    if (!root_) return Jet::constant(static_cast<int>(x.size()), order, 0.0);
    if (static_cast<int>(x.size()) != dim_) throw DimensionError("field evaluated at wrong-dimension point");
    return root_->eval_jet(x, dim_, order);
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    ScalarField f;
    f.root_ = make_binary(Node::kAdd, a.root_, b.root_);
    f.dim_ = a.dim_;
    f.src_ = "(" + a.src_ + ")+(" + b.src_ + ")";
    return f;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    ScalarField f;
    f.root_ = make_binary(Node::kSub, a.root_, b.root_);
    f.dim_ = a.dim_;
    f.src_ = "(" + a.src_ + ")-(" + b.src_ + ")";
    return f;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    ScalarField f;
    f.root_ = make_binary(Node::kMul, a.root_, b.root_);
    f.dim_ = a.dim_;
    f.src_ = "(" + a.src_ + ")*(" + b.src_ + ")";
    return f;
}

ScalarField operator*(double s, const ScalarField& a) { return ScalarField::constant(a.dim(), s) * a; }

}  // namespace schw
