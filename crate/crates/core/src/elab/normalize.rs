//! Let-normalization: every application argument, record payload and list
//! component that is neither a variable nor a value is named by a `let`.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;

use crate::ast::names::NameSupply;
use crate::ast::Expr;

pub fn let_normalize(e: &Expr) -> Expr {
    let mut names = BTreeSet::new();
    e.all_names(&mut names);
    Normalizer { supply: NameSupply::new(names) }.expr(e)
}

struct Normalizer {
    supply: NameSupply,
}

fn simple(e: &Expr) -> bool {
    e.is_value()
}

impl Normalizer {
    /// `let t = e in k(t)`, or `k(e)` when `e` is already simple.
    fn name(&mut self, e: Expr, k: impl FnOnce(Expr) -> Expr) -> Expr {
        if simple(&e) {
            return k(e);
        }
        let t = self.supply.fresh("t");
        Expr::let_(t.clone(), e, k(Expr::var(t)))
    }

    /// Names `a` after `f`, keeping left-to-right evaluation.
    fn pair(&mut self, f: Expr, a: Expr, k: impl FnOnce(Expr, Expr) -> Expr) -> Expr {
        if simple(&a) {
            return k(f, a);
        }
        if simple(&f) {
            return self.name(a, |a| k(f, a));
        }
        let s = self.supply.fresh("t");
        let t = self.supply.fresh("t");
        Expr::let_(s.clone(), f, Expr::let_(t.clone(), a, k(Expr::var(s), Expr::var(t))))
    }

    fn expr(&mut self, e: &Expr) -> Expr {
        match e {
            Expr::Var(_) | Expr::Unit | Expr::Int(_) | Expr::Real(_) | Expr::Str(_) | Expr::Nil | Expr::Prim(_) => {
                e.clone()
            }
            Expr::Lam(x, b) => Expr::lam(x.clone(), self.expr(b)),
            Expr::Fix(x, b) => Expr::fix(x.clone(), self.expr(b)),
            Expr::Merge(a, b) => Expr::merge(self.expr(a), self.expr(b)),
            Expr::App(f, a) => {
                let (f, a) = (self.expr(f), self.expr(a));
                self.pair(f, a, Expr::app)
            }
            Expr::Record(l, p) => {
                let p = self.expr(p);
                self.name(p, |p| Expr::record(l.clone(), p))
            }
            Expr::Cons(h, t) => {
                let (h, t) = (self.expr(h), self.expr(t));
                if simple(&h) || simple(&t) {
                    return self.name_both(h, t);
                }
                self.pair(h, t, Expr::cons)
            }
            Expr::Field(r, l) => Expr::field(self.expr(r), l.clone()),
            Expr::Let(x, a, b) => Expr::let_(x.clone(), self.expr(a), self.expr(b)),
            Expr::Anno(a, t) => Expr::anno(self.expr(a), t.clone()),
            Expr::ListCase { scrut, nil, head, tail, cons } => Expr::ListCase {
                scrut: Box::new(self.expr(scrut)),
                nil: Box::new(self.expr(nil)),
                head: head.clone(),
                tail: tail.clone(),
                cons: Box::new(self.expr(cons)),
            },
        }
    }

    fn name_both(&mut self, h: Expr, t: Expr) -> Expr {
        if simple(&h) {
            return self.name(t, |t| Expr::cons(h, t));
        }
        self.name(h, |h| Expr::cons(h, t))
    }
}
