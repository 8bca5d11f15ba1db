//! Canonical text for source expressions and target terms.
//!
//! Both printers emit text the parsers read back to an α-equivalent tree.
//! Binding forms (`fn`, `fix`, `case`, `lcase`) extend as far right as
//! possible, so they are parenthesized whenever something follows them.

use alloc::string::String;
use core::fmt::{self, Write};

use super::expr::{format_int, Expr};
use super::term::Term;

const EXP: u8 = 0;
const APP: u8 = 1;
const POST: u8 = 2;
const ATOM: u8 = 3;

pub fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn expr_prec(e: &Expr) -> (u8, bool) {
    match e {
        Expr::Merge(..) => (EXP, false),
        Expr::Lam(..) | Expr::Fix(..) | Expr::ListCase { .. } => (EXP, true),
        Expr::App(..) | Expr::Cons(..) => (APP, false),
        Expr::Field(..) => (POST, false),
        _ => (ATOM, false),
    }
}

fn fmt_expr(e: &Expr, prec: u8, rightmost: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (own, binding) = expr_prec(e);
    if own < prec || (binding && !rightmost) {
        f.write_char('(')?;
        fmt_expr(e, EXP, true, f)?;
        return f.write_char(')');
    }
    match e {
        Expr::Var(x) | Expr::Prim(x) => f.write_str(x),
        Expr::Unit => f.write_str("()"),
        Expr::Int(n) => f.write_str(&format_int(n)),
        Expr::Real(r) => f.write_str(&r.text),
        Expr::Str(s) => f.write_str(&escape_string(s)),
        Expr::Nil => f.write_str("nil"),
        Expr::Lam(x, b) => {
            write!(f, "fn {} => ", x)?;
            fmt_expr(b, EXP, rightmost, f)
        }
        Expr::Fix(x, b) => {
            write!(f, "fix {} => ", x)?;
            fmt_expr(b, EXP, rightmost, f)
        }
        Expr::Merge(a, b) => {
            fmt_expr(a, EXP, false, f)?;
            f.write_str(" ,, ")?;
            fmt_expr(b, APP, rightmost, f)
        }
        Expr::App(a, b) => {
            fmt_expr(a, APP, false, f)?;
            f.write_char(' ')?;
            fmt_expr(b, POST, false, f)
        }
        Expr::Cons(a, b) => {
            f.write_str("cons ")?;
            fmt_expr(a, POST, false, f)?;
            f.write_char(' ')?;
            fmt_expr(b, POST, false, f)
        }
        Expr::Field(a, l) => {
            fmt_expr(a, POST, false, f)?;
            write!(f, ".{}", l)
        }
        Expr::Record(l, a) => {
            write!(f, "{{{} = ", l)?;
            fmt_expr(a, EXP, true, f)?;
            f.write_char('}')
        }
        Expr::Anno(a, t) => {
            f.write_char('(')?;
            fmt_expr(a, EXP, true, f)?;
            write!(f, " : {})", t)
        }
        Expr::Let(x, a, b) => {
            write!(f, "let {} = ", x)?;
            fmt_expr(a, EXP, true, f)?;
            f.write_str(" in ")?;
            fmt_expr(b, EXP, true, f)?;
            f.write_str(" end")
        }
        Expr::ListCase { scrut, nil, head, tail, cons } => {
            f.write_str("lcase ")?;
            fmt_expr(scrut, EXP, true, f)?;
            f.write_str(" of nil => ")?;
            fmt_expr(nil, EXP, false, f)?;
            write!(f, " | cons {} {} => ", head, tail)?;
            fmt_expr(cons, EXP, rightmost, f)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, EXP, true, f)
    }
}

fn term_prec(t: &Term) -> (u8, bool) {
    match t {
        Term::Lam(..) | Term::Fix(..) | Term::Case { .. } | Term::ListCase { .. } => (EXP, true),
        Term::App(..) | Term::Cons(..) | Term::Proj(..) | Term::Inj(..) => (APP, false),
        Term::Field(..) => (POST, false),
        _ => (ATOM, false),
    }
}

fn fmt_term(t: &Term, prec: u8, rightmost: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (own, binding) = term_prec(t);
    if own < prec || (binding && !rightmost) {
        f.write_char('(')?;
        fmt_term(t, EXP, true, f)?;
        return f.write_char(')');
    }
    match t {
        Term::Var(x) => f.write_str(x),
        Term::Unit => f.write_str("()"),
        Term::Int(n) => f.write_str(&format_int(n)),
        Term::Real(r) => f.write_str(&r.text),
        Term::Str(s) => f.write_str(&escape_string(s)),
        Term::Nil => f.write_str("nil"),
        Term::Lam(x, b) => {
            write!(f, "fn {} => ", x)?;
            fmt_term(b, EXP, rightmost, f)
        }
        Term::Fix(x, b) => {
            write!(f, "fix {} => ", x)?;
            fmt_term(b, EXP, rightmost, f)
        }
        Term::App(a, b) => {
            if matches!(**a, Term::Proj(..) | Term::Inj(..) | Term::Cons(..)) {
                f.write_char('(')?;
                fmt_term(a, EXP, true, f)?;
                f.write_char(')')?;
            } else {
                fmt_term(a, APP, false, f)?;
            }
            f.write_char(' ')?;
            fmt_term(b, POST, false, f)
        }
        Term::Proj(k, a) => {
            write!(f, "proj{} ", k)?;
            fmt_term(a, POST, false, f)
        }
        Term::Inj(k, a) => {
            write!(f, "inj{} ", k)?;
            fmt_term(a, POST, false, f)
        }
        Term::Cons(a, b) => {
            f.write_str("cons ")?;
            fmt_term(a, POST, false, f)?;
            f.write_char(' ')?;
            fmt_term(b, POST, false, f)
        }
        Term::Pair(a, b) => {
            f.write_char('<')?;
            fmt_term(a, EXP, true, f)?;
            f.write_str(", ")?;
            fmt_term(b, EXP, true, f)?;
            f.write_char('>')
        }
        Term::Field(a, l) => {
            fmt_term(a, POST, false, f)?;
            write!(f, ".{}", l)
        }
        Term::Record(l, a) => {
            write!(f, "{{{} = ", l)?;
            fmt_term(a, EXP, true, f)?;
            f.write_char('}')
        }
        Term::Let(x, a, b) => {
            write!(f, "let {} = ", x)?;
            fmt_term(a, EXP, true, f)?;
            f.write_str(" in ")?;
            fmt_term(b, EXP, true, f)?;
            f.write_str(" end")
        }
        Term::Case { scrut, left, left_arm, right, right_arm } => {
            f.write_str("case ")?;
            fmt_term(scrut, EXP, true, f)?;
            write!(f, " of inj1 {} => ", left)?;
            fmt_term(left_arm, EXP, false, f)?;
            write!(f, " | inj2 {} => ", right)?;
            fmt_term(right_arm, EXP, rightmost, f)
        }
        Term::ListCase { scrut, nil, head, tail, cons } => {
            f.write_str("lcase ")?;
            fmt_term(scrut, EXP, true, f)?;
            f.write_str(" of nil => ")?;
            fmt_term(nil, EXP, false, f)?;
            write!(f, " | cons {} {} => ", head, tail)?;
            fmt_term(cons, EXP, rightmost, f)
        }
        Term::PrimApp(op, args) => {
            write!(f, "@{}(", op.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                fmt_term(a, EXP, true, f)?;
            }
            f.write_char(')')
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, EXP, true, f)
    }
}

pub fn print_source(e: &Expr) -> String {
    alloc::format!("{}", e)
}

pub fn print_target(t: &Term) -> String {
    alloc::format!("{}", t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn source_examples() {
        assert_eq!(Expr::merge(Expr::Unit, Expr::Unit).to_string(), "() ,, ()");
        let e = Expr::merge(Expr::lam("x", Expr::var("x")), Expr::Unit);
        assert_eq!(e.to_string(), "(fn x => x) ,, ()");
        let e = Expr::lam("x", Expr::merge(Expr::var("x"), Expr::Unit));
        assert_eq!(e.to_string(), "fn x => x ,, ()");
        let e = Expr::app(Expr::var("f"), Expr::app(Expr::var("g"), Expr::var("x")));
        assert_eq!(e.to_string(), "f (g x)");
        assert_eq!(Expr::int(-5).to_string(), "~5");
    }

    #[test]
    fn target_examples() {
        assert_eq!(Term::pair(Term::Unit, Term::Unit).to_string(), "<(), ()>");
        assert_eq!(Term::inj(1, Term::Unit).to_string(), "inj1 ()");
        let t = Term::app(Term::proj(1, Term::var("f")), Term::Unit);
        assert_eq!(t.to_string(), "(proj1 f) ()");
        let t = Term::case(Term::var("s"), "x", Term::var("x"), "y", Term::var("y"));
        assert_eq!(t.to_string(), "case s of inj1 x => x | inj2 y => y");
        let t = Term::proj(2, Term::proj(1, Term::var("p")));
        assert_eq!(t.to_string(), "proj2 (proj1 p)");
    }
}
