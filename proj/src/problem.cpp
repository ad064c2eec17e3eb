#include "charp/problem.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace charp {

namespace {

struct Token {
    enum class Kind { ident, number, symbol, arrow, end } kind = Kind::end;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }
    Token take() {
        last_ = cur_;
        Token t = cur_;
        advance();
        return t;
    }
    bool accept_symbol(const std::string& s) {
        if (cur_.kind == Token::Kind::symbol && cur_.text == s) {
            advance();
            return true;
        }
        return false;
    }
    void expect_symbol(const std::string& s) {
        if (!accept_symbol(s)) fail("expected '" + s + "', got '" + cur_.text + "'");
    }
    std::string expect_ident() {
        if (cur_.kind != Token::Kind::ident) fail("expected identifier, got '" + cur_.text + "'");
        return take().text;
    }
    long expect_number() {
        bool neg = false;
        if (cur_.kind == Token::Kind::symbol && cur_.text == "-") {
            neg = true;
            advance();
        }
        if (cur_.kind != Token::Kind::number) fail("expected number, got '" + cur_.text + "'");
        long v = std::stol(take().text);
        return neg ? -v : v;
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, cur_.line, cur_.col); }
    // error anchored at the most recently taken token (for value errors)
    [[noreturn]] void fail_prev(const std::string& what) const { throw ParseError(what, last_.line, last_.col); }

    struct State {
        std::size_t pos;
        int line, col;
        Token cur;
        Token last;
    };
    State save() const { return {pos_, line_, col_, cur_, last_}; }
    void restore(const State& s) {
        pos_ = s.pos;
        line_ = s.line;
        col_ = s.col;
        cur_ = s.cur;
        last_ = s.last;
    }

  private:
    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token cur_;
    Token last_;

    int getc_() {
        if (pos_ >= src_.size()) return -1;
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    int peekc_(std::size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : -1; }

    void advance() {
        // skip whitespace and # comments
        while (true) {
            int c = peekc_();
            if (c == '#') {
                while (peekc_() != -1 && peekc_() != '\n') getc_();
                continue;
            }
            if (c != -1 && std::isspace(c)) {
                getc_();
                continue;
            }
            break;
        }
        cur_.line = line_;
        cur_.col = col_;
        int c = peekc_();
        if (c == -1) {
            cur_ = {Token::Kind::end, "<eof>", line_, col_};
            return;
        }
        if (std::isalpha(c) || c == '_') {
            std::string s;
            while (peekc_() != -1 && (std::isalnum(peekc_()) || peekc_() == '_' || peekc_() == '\''))
                s.push_back(static_cast<char>(getc_()));
            cur_ = {Token::Kind::ident, s, cur_.line, cur_.col};
            return;
        }
        if (std::isdigit(c)) {
            std::string s;
            while (peekc_() != -1 && std::isdigit(peekc_())) s.push_back(static_cast<char>(getc_()));
            cur_ = {Token::Kind::number, s, cur_.line, cur_.col};
            return;
        }
        if (c == '-' && peekc_(1) == '>') {
            getc_();
            getc_();
            cur_ = {Token::Kind::arrow, "->", cur_.line, cur_.col};
            return;
        }
        cur_ = {Token::Kind::symbol, std::string(1, static_cast<char>(getc_())), cur_.line, cur_.col};
    }
};

class Parser {
  public:
    explicit Parser(const std::string& src) : lex_(src) {}

    ProblemFile parse() {
        while (lex_.peek().kind != Token::Kind::end) {
            std::string word = lex_.expect_ident();
            if (word == "lift") {
                pf_.lifts.push_back(parse_lift());
            } else if (word == "connection") {
                pf_.connections.push_back(parse_connection());
            } else if (word == "higgs") {
                pf_.higgs.push_back(parse_higgs());
            } else if (word == "foliation") {
                pf_.foliations.push_back(parse_foliation());
            } else if (word == "cover") {
                if (pf_.cover) lex_.fail("duplicate cover block");
                pf_.cover = parse_cover();
            } else if (word == "fontaine") {
                if (pf_.fontaine) lex_.fail("duplicate fontaine block");
                pf_.fontaine = parse_fontaine();
            } else {
                parse_header_field(word);
            }
        }
        if (pf_.p == 0) lex_.fail("missing header field p");
        return pf_;
    }

  private:
    Lexer lex_;
    ProblemFile pf_;

    std::uint32_t p() {
        if (pf_.p == 0) lex_.fail("header field p must come before blocks");
        return pf_.p;
    }

    void parse_header_field(const std::string& key) {
        lex_.expect_symbol("=");
        if (key == "p") {
            long v = lex_.expect_number();
            if (v < 2 || !is_prime(static_cast<std::uint32_t>(v)))
                lex_.fail_prev("p must be prime, got " + std::to_string(v));
            pf_.p = static_cast<std::uint32_t>(v);
        } else if (key == "seed") {
            pf_.seed = static_cast<std::uint64_t>(lex_.expect_number());
        } else if (key == "max_degree") {
            pf_.max_degree = static_cast<int>(lex_.expect_number());
        } else if (key == "n_max") {
            pf_.n_max = static_cast<int>(lex_.expect_number());
        } else if (key == "deg_bound") {
            pf_.deg_bound = static_cast<int>(lex_.expect_number());
        } else if (key == "task") {
            pf_.default_task = lex_.expect_ident();
            while (lex_.accept_symbol("-")) pf_.default_task += "-" + lex_.expect_ident();
        } else if (key == "expect") {
            pf_.expect = lex_.expect_ident();
        } else {
            lex_.fail("unknown header field '" + key + "'");
        }
    }

    std::vector<std::string> parse_name_list() {
        lex_.expect_symbol("[");
        std::vector<std::string> names;
        if (!lex_.accept_symbol("]")) {
            names.push_back(lex_.expect_ident());
            while (lex_.accept_symbol(",")) names.push_back(lex_.expect_ident());
            lex_.expect_symbol("]");
        }
        return names;
    }

    // polynomial text: tokens up to one of , ] ; } (not consumed)
    Poly parse_poly_value(const std::vector<std::string>& ring) {
        std::ostringstream text;
        int parts = 0;
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::Kind::end) break;
            if (t.kind == Token::Kind::symbol &&
                (t.text == "," || t.text == "]" || t.text == ";" || t.text == "}"))
                break;
            if (t.kind == Token::Kind::arrow) lex_.fail("unexpected '->' inside polynomial");
            text << (parts++ ? " " : "") << lex_.take().text;
        }
        if (parts == 0) lex_.fail("empty polynomial");
        try {
            return parse_poly(p(), ring, text.str());
        } catch (const std::exception& e) {
            lex_.fail(e.what());
        }
    }

    std::vector<Poly> parse_poly_list(const std::vector<std::string>& ring) {
        lex_.expect_symbol("[");
        std::vector<Poly> out;
        if (!lex_.accept_symbol("]")) {
            out.push_back(parse_poly_value(ring));
            while (lex_.accept_symbol(",")) out.push_back(parse_poly_value(ring));
            lex_.expect_symbol("]");
        }
        return out;
    }

    PolyMat parse_matrix(const std::vector<std::string>& ring) {
        lex_.expect_symbol("[");
        std::vector<std::vector<Poly>> rows;
        if (!lex_.accept_symbol("]")) {
            do {
                rows.push_back(parse_poly_list(ring));
            } while (lex_.accept_symbol(","));
            lex_.expect_symbol("]");
        }
        std::size_t cols = rows.empty() ? 0 : rows[0].size();
        for (const auto& r : rows)
            if (r.size() != cols) lex_.fail("ragged matrix rows");
        PolyMat m(p(), ring, rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
        return m;
    }

    // derivation clauses: var -> poly { ; var -> poly }, with one-token
    // lookahead deciding whether a ';' continues the derivation
    DerivationOp parse_derivation_value(const std::vector<std::string>& ring) {
        DerivationOp D(p(), ring);
        if (lex_.peek().kind == Token::Kind::number) {
            long v = lex_.expect_number();
            if (v != 0) lex_.fail("a bare numeric derivation must be 0");
            return D;
        }
        while (true) {
            std::string var = lex_.expect_ident();
            if (lex_.peek().kind != Token::Kind::arrow) lex_.fail("expected '->' after '" + var + "'");
            lex_.take();
            Poly v = parse_poly_value(ring);
            try {
                D.set_value(var, v);
            } catch (const std::exception& e) {
                lex_.fail(e.what());
            }
            if (lex_.peek().kind == Token::Kind::symbol && lex_.peek().text == ";") {
                // continue only for `; ident ->`
                auto mark = lex_.save();
                lex_.take();
                if (lex_.peek().kind == Token::Kind::ident) {
                    lex_.take();
                    if (lex_.peek().kind == Token::Kind::arrow) {
                        lex_.restore(mark);
                        lex_.take(); // ';'
                        continue;
                    }
                }
                lex_.restore(mark);
                break;
            }
            break;
        }
        return D;
    }

    FrobLift parse_lift() {
        lex_.expect_symbol("{");
        std::vector<std::string> vars;
        std::vector<Poly> a;
        bool saw_vars = false, saw_a = false;
        while (!lex_.accept_symbol("}")) {
            if (lex_.accept_symbol(";")) continue;
            std::string key = lex_.expect_ident();
            lex_.expect_symbol("=");
            if (key == "vars") {
                vars = parse_name_list();
                saw_vars = true;
            } else if (key == "a") {
                if (!saw_vars) lex_.fail("lift: vars must precede a");
                a = parse_poly_list(vars);
                saw_a = true;
            } else {
                lex_.fail("lift: unknown key '" + key + "'");
            }
        }
        if (!saw_vars || !saw_a) lex_.fail("lift: vars and a are required");
        try {
            return FrobLift(p(), vars, a);
        } catch (const std::exception& e) {
            lex_.fail(e.what());
        }
    }

    std::vector<std::string> default_base_vars() {
        if (!pf_.lifts.empty()) return pf_.lifts.front().base_vars;
        lex_.fail("connection: no vars given and no lift block to take them from");
    }

    LinearConnection parse_connection() {
        lex_.expect_symbol("{");
        std::vector<std::string> vars;
        bool saw_vars = false;
        long lambda = -1, rank = -1;
        std::vector<std::pair<std::size_t, PolyMat>> mats;
        while (!lex_.accept_symbol("}")) {
            if (lex_.accept_symbol(";")) continue;
            std::string key = lex_.expect_ident();
            if (key == "A") {
                lex_.expect_symbol("[");
                long idx = lex_.expect_number();
                lex_.expect_symbol("]");
                lex_.expect_symbol("=");
                if (!saw_vars) {
                    vars = default_base_vars();
                    saw_vars = true;
                }
                if (idx < 1) lex_.fail("connection: A indices are 1-based");
                mats.emplace_back(static_cast<std::size_t>(idx - 1), parse_matrix(vars));
                continue;
            }
            lex_.expect_symbol("=");
            if (key == "vars") {
                vars = parse_name_list();
                saw_vars = true;
            } else if (key == "lambda") {
                lambda = lex_.expect_number();
            } else if (key == "rank") {
                rank = lex_.expect_number();
            } else {
                lex_.fail("connection: unknown key '" + key + "'");
            }
        }
        if (lambda < 0 || lambda > 1) lex_.fail("connection: lambda must be 0 or 1");
        if (rank < 1) lex_.fail("connection: rank must be >= 1");
        if (!saw_vars) vars = default_base_vars();
        std::vector<PolyMat> A(vars.size(), PolyMat(p(), vars, static_cast<std::size_t>(rank),
                                                    static_cast<std::size_t>(rank)));
        for (auto& [idx, m] : mats) {
            if (idx >= vars.size()) lex_.fail("connection: A index exceeds number of base variables");
            if (m.rows() != static_cast<std::size_t>(rank) || m.cols() != static_cast<std::size_t>(rank))
                lex_.fail("connection: matrix shape does not match rank");
            A[idx] = m;
        }
        try {
            return LinearConnection(p(), vars, static_cast<std::uint32_t>(lambda),
                                    static_cast<std::size_t>(rank), A);
        } catch (const std::exception& e) {
            lex_.fail(e.what());
        }
    }

    template <typename Space>
    Space parse_total_space(const char* what, const char* field) {
        lex_.expect_symbol("{");
        Space S;
        S.p = p();
        bool saw_base = false, saw_fiber = false;
        std::vector<std::pair<std::size_t, DerivationOp>> ops;
        while (!lex_.accept_symbol("}")) {
            if (lex_.accept_symbol(";")) continue;
            std::string key = lex_.expect_ident();
            if (key == field) {
                lex_.expect_symbol("[");
                long idx = lex_.expect_number();
                lex_.expect_symbol("]");
                lex_.expect_symbol("=");
                if (!saw_base || !saw_fiber) lex_.fail(std::string(what) + ": base and fiber must precede " + field);
                if (idx < 1) lex_.fail(std::string(what) + ": indices are 1-based");
                ops.emplace_back(static_cast<std::size_t>(idx - 1), parse_derivation_value(S.ring()));
                continue;
            }
            lex_.expect_symbol("=");
            if (key == "base") {
                S.base_vars = parse_name_list();
                saw_base = true;
            } else if (key == "fiber") {
                S.fiber_vars = parse_name_list();
                saw_fiber = true;
            } else if (key == "ideal") {
                if (!saw_base || !saw_fiber) lex_.fail(std::string(what) + ": base and fiber must precede ideal");
                S.relations = parse_poly_list(S.ring());
            } else {
                lex_.fail(std::string(what) + ": unknown key '" + key + "'");
            }
        }
        if (!saw_base || !saw_fiber) lex_.fail(std::string(what) + ": base and fiber are required");
        std::vector<DerivationOp> list(S.base_vars.size(), DerivationOp::zero(S.p, S.ring()));
        for (auto& [idx, D] : ops) {
            if (idx >= list.size()) lex_.fail(std::string(what) + ": index exceeds number of base variables");
            list[idx] = D;
        }
        if constexpr (std::is_same_v<Space, HiggsTotalSpace>)
            S.theta = std::move(list);
        else
            S.nabla = std::move(list);
        return S;
    }

    HiggsTotalSpace parse_higgs() { return parse_total_space<HiggsTotalSpace>("higgs", "Theta"); }
    FoliatedTotalSpace parse_foliation() { return parse_total_space<FoliatedTotalSpace>("foliation", "D"); }

    CoverBlock parse_cover() {
        lex_.expect_symbol("{");
        CoverBlock cb;
        while (!lex_.accept_symbol("}")) {
            if (lex_.accept_symbol(";")) continue;
            std::string key = lex_.expect_ident();
            if (key == "chart") {
                std::string id = lex_.expect_ident();
                lex_.expect_symbol("{");
                std::string inner = lex_.expect_ident();
                if (inner != "lift") lex_.fail("cover chart: expected lift block");
                Chart ch;
                ch.id = id;
                ch.lift = parse_lift();
                lex_.expect_symbol("}");
                cb.charts.push_back(std::move(ch));
            } else if (key == "higgs") {
                try {
                    cb.theta = higgs_space_to_matrices(parse_higgs());
                } catch (const ParseError&) {
                    throw;
                } catch (const std::exception& e) {
                    lex_.fail(e.what());
                }
                cb.has_theta = true;
            } else if (key == "connection") {
                cb.theta = parse_connection();
                if (cb.theta.lambda != 0) lex_.fail("cover: shared data must have lambda = 0");
                cb.has_theta = true;
            } else if (key == "g") {
                lex_.expect_symbol("[");
                std::string a = lex_.expect_ident();
                lex_.expect_symbol("]");
                lex_.expect_symbol("[");
                std::string b = lex_.expect_ident();
                lex_.expect_symbol("]");
                lex_.expect_symbol("=");
                if (!cb.has_theta) lex_.fail("cover: overrides must follow the shared higgs data");
                cb.overrides.emplace_back(a, b, parse_matrix(cb.theta.base_vars));
            } else {
                lex_.fail("cover: unknown key '" + key + "'");
            }
        }
        if (cb.charts.size() < 1) lex_.fail("cover: at least one chart required");
        if (!cb.has_theta) lex_.fail("cover: shared higgs data required");
        return cb;
    }

    FontaineBlock parse_fontaine() {
        lex_.expect_symbol("{");
        std::optional<LinearConnection> conn;
        std::vector<PolyMat> fil;
        bool saw_fil = false;
        std::vector<FrobLift> lifts;
        while (!lex_.accept_symbol("}")) {
            if (lex_.accept_symbol(";")) continue;
            std::string key = lex_.expect_ident();
            if (key == "connection") {
                conn = parse_connection();
            } else if (key == "lift") {
                lifts.push_back(parse_lift());
            } else if (key == "filtration") {
                if (!conn) lex_.fail("fontaine: connection must precede filtration");
                lex_.expect_symbol("=");
                lex_.expect_symbol("[");
                if (!lex_.accept_symbol("]")) {
                    do {
                        fil.push_back(parse_matrix(conn->base_vars));
                    } while (lex_.accept_symbol(","));
                    lex_.expect_symbol("]");
                }
                saw_fil = true;
            } else {
                lex_.fail("fontaine: unknown key '" + key + "'");
            }
        }
        if (!conn || !saw_fil || lifts.empty())
            lex_.fail("fontaine: connection, filtration and lift are required");
        FontaineBlock fb{*conn, FilteredModule{}, lifts};
        fb.filtration.p = p();
        fb.filtration.base_vars = conn->base_vars;
        fb.filtration.rank = conn->rank;
        for (auto& m : fil) {
            // columns given row-by-row in the file: each matrix lists generator
            // columns as rows for readability; transpose into column form
            PolyMat cols(p(), conn->base_vars, conn->rank, m.rows());
            if (m.cols() != conn->rank) lex_.fail("fontaine: filtration generator width must equal rank");
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j) cols.at(j, i) = m.at(i, j);
            fb.filtration.fil.push_back(std::move(cols));
        }
        return fb;
    }
};

} // namespace

ProblemFile parse_problem_file(const std::string& text) { return Parser(text).parse(); }

ProblemFile parse_problem_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_file(ss.str());
}

LinearHiggs higgs_space_to_matrices(const HiggsTotalSpace& H) {
    H.validate();
    const std::size_t m = H.base_vars.size();
    const std::size_t r = H.fiber_vars.size();
    auto vars = H.ring();
    std::vector<PolyMat> A(m, PolyMat(H.p, H.base_vars, r, r));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            const Poly& v = H.theta[i].values[m + j];
            Poly rest = v;
            for (std::size_t k = 0; k < r; ++k) {
                // coefficient of fiber variable k: must be a base polynomial
                Poly coeff(H.p, H.base_vars);
                for (const auto& [e, c] : v.terms()) {
                    if (e[m + k] != 1) continue;
                    bool pure = true;
                    Exponents be(m, 0);
                    for (std::size_t l = 0; l < vars.size(); ++l) {
                        if (l == m + k) continue;
                        if (l >= m && e[l] != 0) { pure = false; break; }
                        if (l < m) be[l] = e[l];
                    }
                    if (!pure) throw std::invalid_argument("higgs data is not linear in the fiber variables");
                    coeff.add_term(be, c);
                }
                A[i].at(j, k) = coeff;
                rest -= coeff.embedded_into(vars) * Poly::variable(H.p, vars, H.fiber_vars[k]);
            }
            if (!rest.is_zero())
                throw std::invalid_argument("higgs data is not linear in the fiber variables: residue " +
                                            rest.str());
        }
    return LinearHiggs(H.p, H.base_vars, 0, r, A);
}

} // namespace charp
