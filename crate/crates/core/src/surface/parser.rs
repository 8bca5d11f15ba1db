//! Recursive-descent parsers for programs, source expressions, source types
//! and target terms.
//!
//! Expression precedence, loosest first: binding forms (`fn`, `fix`,
//! `lcase`, whose bodies extend as far right as possible), `,,` (left
//! associative), application, `.field`. Type precedence, loosest first:
//! `->` (right associative), `\/`, `&`, `list`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use super::lexer::{tokenize, Pos, Tok, Token};
use super::syntax::{Decl, Program, SurfaceExpr, SurfaceExprKind as K, SurfaceType};
use super::ParseError;
use crate::ast::{BaseType, Name, PrimOp, RealLit, Term};

const KEYWORDS: &[&str] = &["fn", "fix", "let", "in", "end", "nil", "cons", "lcase", "of", "val", "type"];
const TARGET_KEYWORDS: &[&str] = &["proj1", "proj2", "inj1", "inj2", "case"];

struct Parser {
    toks: Vec<Token>,
    i: usize,
    target: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, target: bool) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(src)?, i: 0, target })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(ParseError::new(self.pos(), format!("expected {}, found {}", what, self.peek())))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.advance().pos)
        } else {
            self.error(what)
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Pos> {
        if self.is_kw(kw) {
            Ok(self.advance().pos)
        } else {
            self.error(&format!("`{}`", kw))
        }
    }

    fn reserved(&self, x: &str) -> bool {
        KEYWORDS.contains(&x) || (self.target && TARGET_KEYWORDS.contains(&x))
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(x) if !self.reserved(x) => {
                let x = x.clone();
                self.advance();
                Ok(x)
            }
            _ => self.error("an identifier"),
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn finish(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<SurfaceType> {
        let lhs = self.ty_union()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.ty()?;
            return Ok(SurfaceType::Arrow(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn ty_union(&mut self) -> PResult<SurfaceType> {
        let mut lhs = self.ty_inter()?;
        while *self.peek() == Tok::Or {
            self.advance();
            let rhs = self.ty_inter()?;
            lhs = SurfaceType::Union(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn ty_inter(&mut self) -> PResult<SurfaceType> {
        let mut lhs = self.ty_prefix()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let rhs = self.ty_prefix()?;
            lhs = SurfaceType::Intersect(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn ty_prefix(&mut self) -> PResult<SurfaceType> {
        if self.is_kw("list") {
            self.advance();
            return Ok(SurfaceType::List(Box::new(self.ty_prefix()?)));
        }
        self.ty_atom()
    }

    fn ty_atom(&mut self) -> PResult<SurfaceType> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::LBrace => {
                self.advance();
                let mut fields = Vec::new();
                loop {
                    let l = self.ident()?;
                    self.expect(Tok::Colon, "`:`")?;
                    fields.push((l, self.ty()?));
                    if *self.peek() == Tok::Comma {
                        self.advance();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace, "`,` or `}`")?;
                Ok(SurfaceType::Record(fields))
            }
            Tok::Ident(x) if x == "top" => {
                self.advance();
                Ok(SurfaceType::Top)
            }
            Tok::Ident(x) if !self.reserved(&x) && x != "list" => {
                self.advance();
                Ok(match BaseType::from_name(&x) {
                    Some(b) => SurfaceType::Base(b),
                    None => SurfaceType::Named(x, pos),
                })
            }
            _ => self.error("a type"),
        }
    }

    // ---- source expressions ----

    fn exp(&mut self) -> PResult<SurfaceExpr> {
        let mut lhs = self.merge_operand()?;
        while *self.peek() == Tok::MergeOp {
            let pos = self.advance().pos;
            let rhs = self.merge_operand()?;
            lhs = SurfaceExpr { kind: K::Merge(Box::new(lhs), Box::new(rhs)), pos };
        }
        Ok(lhs)
    }

    fn merge_operand(&mut self) -> PResult<SurfaceExpr> {
        let pos = self.pos();
        if self.is_kw("fn") || self.is_kw("fix") {
            let is_fix = self.is_kw("fix");
            self.advance();
            let x = self.ident()?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let body = Box::new(self.exp()?);
            let kind = if is_fix { K::Fix(x, body) } else { K::Lam(x, body) };
            return Ok(SurfaceExpr { kind, pos });
        }
        if self.is_kw("lcase") {
            self.advance();
            let scrut = Box::new(self.exp()?);
            self.expect_kw("of")?;
            self.expect_kw("nil")?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let nil = Box::new(self.exp()?);
            self.expect(Tok::Bar, "`|`")?;
            self.expect_kw("cons")?;
            let head = self.ident()?;
            let tail = self.ident()?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let cons = Box::new(self.exp()?);
            return Ok(SurfaceExpr { kind: K::ListCase { scrut, nil, head, tail, cons }, pos });
        }
        self.app()
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::LBrace | Tok::Int(_) | Tok::Real(..) | Tok::Str(_) => true,
            Tok::Ident(x) => x == "nil" || x == "let" || !self.reserved(x),
            Tok::Lt | Tok::At => self.target,
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<SurfaceExpr> {
        let pos = self.pos();
        let mut head = if self.is_kw("cons") {
            self.advance();
            let h = self.postfix()?;
            let t = self.postfix()?;
            SurfaceExpr { kind: K::Cons(Box::new(h), Box::new(t)), pos }
        } else {
            self.postfix()?
        };
        while self.starts_atom() {
            let arg = self.postfix()?;
            head = SurfaceExpr { kind: K::App(Box::new(head), Box::new(arg)), pos };
        }
        Ok(head)
    }

    fn postfix(&mut self) -> PResult<SurfaceExpr> {
        let mut e = self.atom()?;
        while *self.peek() == Tok::Dot {
            let pos = self.advance().pos;
            let l = self.ident()?;
            e = SurfaceExpr { kind: K::Field(Box::new(e), l), pos };
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<SurfaceExpr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                if *self.peek() == Tok::RParen {
                    self.advance();
                    K::Unit
                } else {
                    let e = self.exp()?;
                    if *self.peek() == Tok::Colon {
                        self.advance();
                        let t = self.ty()?;
                        self.expect(Tok::RParen, "`)`")?;
                        K::Anno(Box::new(e), t)
                    } else {
                        self.expect(Tok::RParen, "`)` or `:`")?;
                        return Ok(e);
                    }
                }
            }
            Tok::LBrace => {
                self.advance();
                let mut fields = Vec::new();
                loop {
                    let l = self.ident()?;
                    self.expect(Tok::Eq, "`=`")?;
                    fields.push((l, self.exp()?));
                    if *self.peek() == Tok::Comma {
                        self.advance();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace, "`,` or `}`")?;
                K::Record(fields)
            }
            Tok::Int(n) => {
                self.advance();
                K::Int(n)
            }
            Tok::Real(text, v) => {
                self.advance();
                K::Real(RealLit::new(text, v))
            }
            Tok::Str(s) => {
                self.advance();
                K::Str(s)
            }
            Tok::Ident(x) if x == "nil" => {
                self.advance();
                K::Nil
            }
            Tok::Ident(x) if x == "let" => {
                self.advance();
                let y = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let bound = self.exp()?;
                self.expect_kw("in")?;
                let body = self.exp()?;
                self.expect_kw("end")?;
                K::Let(y, Box::new(bound), Box::new(body))
            }
            Tok::Ident(x) if !self.reserved(&x) => {
                self.advance();
                K::Var(x)
            }
            _ => return self.error("an expression"),
        };
        Ok(SurfaceExpr { kind, pos })
    }

    // ---- programs ----

    fn program(&mut self) -> PResult<Program> {
        let mut decls = Vec::new();
        let mut pending: Option<(Name, SurfaceType, Pos)> = None;
        while !self.at_eof() {
            let pos = self.pos();
            if *self.peek() == Tok::AnnoOpen {
                self.advance();
                if let Some((name, _, at)) = &pending {
                    return Err(ParseError::new(*at, format!("annotation for {} has no declaration", name)));
                }
                self.expect_kw("val")?;
                let name = self.ident()?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.ty()?;
                self.expect(Tok::AnnoClose, "`]*)`")?;
                pending = Some((name, ty, pos));
            } else if self.is_kw("val") {
                self.advance();
                let name = self.ident()?;
                let mut ty = None;
                if *self.peek() == Tok::Colon {
                    self.advance();
                    ty = Some(self.ty()?);
                }
                self.expect(Tok::Eq, "`=`")?;
                let body = self.exp()?;
                if let Some((anno_name, anno_ty, at)) = pending.take() {
                    if anno_name != name {
                        return Err(ParseError::new(
                            at,
                            format!("annotation names {} but the next declaration is {}", anno_name, name),
                        ));
                    }
                    if ty.is_some() {
                        return Err(ParseError::new(at, format!("{} is annotated twice", name)));
                    }
                    ty = Some(anno_ty);
                }
                decls.push(Decl::Val { name, ty, body, pos });
            } else if self.is_kw("type") {
                self.advance();
                let name = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let ty = self.ty()?;
                decls.push(Decl::Type { name, ty, pos });
            } else {
                return self.error("`val` or `type`");
            }
        }
        if let Some((name, _, at)) = pending {
            return Err(ParseError::new(at, format!("annotation for {} has no declaration", name)));
        }
        Ok(Program { decls })
    }

    // ---- target terms ----

    fn term(&mut self) -> PResult<Term> {
        if self.is_kw("fn") || self.is_kw("fix") {
            let is_fix = self.is_kw("fix");
            self.advance();
            let x = self.ident()?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let body = self.term()?;
            return Ok(if is_fix { Term::fix(x, body) } else { Term::lam(x, body) });
        }
        if self.is_kw("case") {
            self.advance();
            let scrut = self.term()?;
            self.expect_kw("of")?;
            self.expect_kw("inj1")?;
            let x1 = self.ident()?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let n1 = self.term()?;
            self.expect(Tok::Bar, "`|`")?;
            self.expect_kw("inj2")?;
            let x2 = self.ident()?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let n2 = self.term()?;
            return Ok(Term::case(scrut, x1, n1, x2, n2));
        }
        if self.is_kw("lcase") {
            self.advance();
            let scrut = Box::new(self.term()?);
            self.expect_kw("of")?;
            self.expect_kw("nil")?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let nil = Box::new(self.term()?);
            self.expect(Tok::Bar, "`|`")?;
            self.expect_kw("cons")?;
            let head = self.ident()?;
            let tail = self.ident()?;
            self.expect(Tok::FatArrow, "`=>`")?;
            let cons = Box::new(self.term()?);
            return Ok(Term::ListCase { scrut, nil, head, tail, cons });
        }
        self.term_app()
    }

    fn term_app(&mut self) -> PResult<Term> {
        let kw = match self.peek() {
            Tok::Ident(x) => Some(x.clone()),
            _ => None,
        };
        let mut head = match kw.as_deref() {
            Some("proj1") | Some("proj2") | Some("inj1") | Some("inj2") => {
                let k = self.advance();
                let arg = self.term_postfix()?;
                let idx = if matches!(&k.tok, Tok::Ident(x) if x.ends_with('1')) { 1 } else { 2 };
                if matches!(&k.tok, Tok::Ident(x) if x.starts_with("proj")) {
                    Term::proj(idx, arg)
                } else {
                    Term::inj(idx, arg)
                }
            }
            Some("cons") => {
                self.advance();
                let h = self.term_postfix()?;
                let t = self.term_postfix()?;
                Term::cons(h, t)
            }
            _ => self.term_postfix()?,
        };
        while self.starts_atom() {
            let arg = self.term_postfix()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn term_postfix(&mut self) -> PResult<Term> {
        let mut t = self.term_atom()?;
        while *self.peek() == Tok::Dot {
            self.advance();
            let l = self.ident()?;
            t = Term::Field(Box::new(t), l);
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                if *self.peek() == Tok::RParen {
                    self.advance();
                    return Ok(Term::Unit);
                }
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Lt => {
                self.advance();
                let a = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.term()?;
                self.expect(Tok::Gt, "`>`")?;
                Ok(Term::pair(a, b))
            }
            Tok::LBrace => {
                self.advance();
                let l = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let t = self.term()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Term::Record(l, Box::new(t)))
            }
            Tok::At => {
                self.advance();
                let pos = self.pos();
                let name = self.ident()?;
                let op = PrimOp::from_name(&name)
                    .ok_or_else(|| ParseError::new(pos, format!("unknown primitive @{}", name)))?;
                self.expect(Tok::LParen, "`(`")?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.term()?);
                        if *self.peek() == Tok::Comma {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                Ok(Term::PrimApp(op, args))
            }
            Tok::Int(n) => {
                self.advance();
                Ok(Term::Int(n))
            }
            Tok::Real(text, v) => {
                self.advance();
                Ok(Term::Real(RealLit::new(text, v)))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Term::Str(s))
            }
            Tok::Ident(x) if x == "nil" => {
                self.advance();
                Ok(Term::Nil)
            }
            Tok::Ident(x) if x == "let" => {
                self.advance();
                let y = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let bound = self.term()?;
                self.expect_kw("in")?;
                let body = self.term()?;
                self.expect_kw("end")?;
                Ok(Term::let_(y, bound, body))
            }
            Tok::Ident(x) if !self.reserved(&x) => {
                self.advance();
                Ok(Term::Var(x))
            }
            _ => self.error("a term"),
        }
    }
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src, false)?;
    p.program()
}

pub fn parse_surface_expr(src: &str) -> Result<SurfaceExpr, ParseError> {
    let mut p = Parser::new(src, false)?;
    let e = p.exp()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_surface_type(src: &str) -> Result<SurfaceType, ParseError> {
    let mut p = Parser::new(src, false)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_target(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, true)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Name of a reserved word, for printers that must avoid them.
pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name) || TARGET_KEYWORDS.contains(&name)
}
