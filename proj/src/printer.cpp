#include "svr/syntax.hpp"
#include "util.hpp"

namespace svr {

namespace {

std::string paren(bool wrap, std::string s) { return wrap ? "(" + s + ")" : s; }

std::string value_atom(const Value& v) { return to_string(mk::val(v), Prec::Atom); }

}  // namespace

std::string to_string(const Value& v) { return to_string(mk::val(v), Prec::Top); }

std::string to_string(const Term& t, Prec p) {
  return std::visit(
      overloaded{
          [&](const Val& x) -> std::string {
            return std::visit(
                overloaded{[](const LambdaVar& y) { return y.name; },
                           [&](const Lambda& l) { return paren(p != Prec::Top, "λ" + l.param + " " + to_string(l.body, Prec::Top)); },
                           [](const Ctor& c) {
                             if (is_empty_record(c.payload)) return c.name + "[]";
                             return c.name + "[" + to_string(c.payload) + "]";
                           },
                           [](const Record& r) {
                             std::string s = "{";
                             bool first = true;
                             for (const auto& [l, w] : r.fields) {
                               if (!first) s += "; ";
                               first = false;
                               s += l + " = " + to_string(w);
                             }
                             return s + "}";
                           },
                           [](const Scissors&) { return std::string("✂"); }},
                x.value->node);
          },
          [](const TermVar& a) { return a.name; },
          [&](const App& a) {
            return paren(p == Prec::Atom, to_string(a.fun, Prec::AppFun) + " " + to_string(a.arg, Prec::Atom));
          },
          [&](const Mu& m) { return paren(p != Prec::Top, "μ" + m.var + " " + to_string(m.body, Prec::Top)); },
          [](const Proc& q) { return "(" + to_string(q.process) + ")"; },
          [](const Proj& q) { return value_atom(q.record) + "." + q.label; },
          [&](const Case& c) {
            std::string s = "case " + value_atom(c.scrutinee) + " [";
            bool first = true;
            for (const auto& [k, b] : c.branches) {
              if (!first) s += " | ";
              first = false;
              s += k + "[" + b.var + "] → " + to_string(b.body, Prec::Top);
            }
            return paren(p != Prec::Top, s + "]");
          },
          [](const Delta& d) { return "δ(" + to_string(d.left) + ", " + to_string(d.right) + ")"; },
          [](const UnitProbe& u) { return "unit(" + to_string(u.arg) + ")"; }},
      t->node);
}

std::string to_string(const Term& t) { return to_string(t, Prec::Top); }

std::string to_string(const Stack& s) {
  return std::visit(overloaded{[](const StackVar& a) { return a.name; },
                               [](const Push& q) { return value_atom(q.head) + "." + to_string(q.tail); },
                               [](const Frame& f) { return "[" + to_string(f.fun) + "]" + to_string(f.tail); }},
                    s->node);
}

std::string to_string(const Process& p) { return to_string(p.term, Prec::AppFun) + " ∗ " + to_string(p.stack); }

}  // namespace svr
