//! Recursive-descent parser for the concrete formula syntax.
//!
//! `and` binds tighter than the disjunctions `or`, `ior` and `orp{..}`, all of
//! which associate to the left. Prefix operators (quantifiers, `store`,
//! restricted quantifiers) extend as far to the right as possible.

use std::collections::BTreeMap;

use super::analysis::validate;
use super::ast::{EsoFormula, Formula, Restriction, Term, Vocabulary};
use super::SyntaxError;

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept variables from the reserved `$` namespace. Off for user input.
    pub allow_reserved: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Reserved(String),
    Num(usize),
    Sym(&'static str),
    End,
}

const KEYWORDS: &[&str] = &[
    "and", "or", "ior", "orp", "exists", "forall", "sub", "excl", "eqext", "sube", "dep", "store",
    "rel", "EX",
];

const SYMBOLS: &[&str] = &["!=", "->", "(", ")", "[", "]", "{", "}", ",", ";", ".", ":", "=", "!"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        if c == b'$' {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if i == start + 1 {
                return Err(SyntaxError::parse(start, "empty reserved name"));
            }
            out.push((Tok::Reserved(text[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i]
                .parse()
                .map_err(|_| SyntaxError::parse(start, "number out of range"))?;
            out.push((Tok::Num(n), start));
            continue;
        }
        for s in SYMBOLS {
            if text[i..].starts_with(s) {
                out.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        let ch = text[i..].chars().next().unwrap_or('?');
        return Err(SyntaxError::parse(i, format!("unexpected character `{ch}`")));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: &'a Vocabulary,
    opts: ParseOptions,
    /// `Some` while parsing an ESO matrix: relation variables seen so far.
    relvars: Option<BTreeMap<String, usize>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::parse(self.offset(), msg))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn variable(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if !is_variable_name(&name) || KEYWORDS.contains(&name.as_str()) {
                    return self.err(format!("`{name}` is not a variable name"));
                }
                if self.vocab.contains_symbol(&name) {
                    return self.err(format!("`{name}` is a vocabulary symbol, not a variable"));
                }
                self.bump();
                Ok(name)
            }
            Tok::Reserved(name) => {
                if !self.opts.allow_reserved {
                    return self.err(format!("`{name}` is in the reserved namespace"));
                }
                self.bump();
                Ok(name)
            }
            _ => self.err("expected a variable"),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Reserved(_) => Ok(Term::Var(self.variable()?)),
            Tok::Ident(name) => {
                if self.vocab.constants.contains(&name) {
                    self.bump();
                    return Ok(Term::Const(name));
                }
                if matches!(self.peek_at(1), Tok::Sym("(")) {
                    let Some(&arity) = self.vocab.functions.get(&name) else {
                        return self.err(format!("unknown function symbol `{name}`"));
                    };
                    self.bump();
                    let args = self.paren_terms()?;
                    if args.len() != arity {
                        return self.err(format!(
                            "function `{name}` has arity {arity}, applied to {}",
                            args.len()
                        ));
                    }
                    return Ok(Term::App(name, args));
                }
                Ok(Term::Var(self.variable()?))
            }
            _ => self.err("expected a term"),
        }
    }

    fn term_list(&mut self, close: &str) -> Result<Vec<Term>, SyntaxError> {
        let mut out = Vec::new();
        if self.is_sym(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.is_sym(",") {
                self.bump();
                continue;
            }
            self.expect_sym(close)?;
            return Ok(out);
        }
    }

    fn paren_terms(&mut self) -> Result<Vec<Term>, SyntaxError> {
        self.expect_sym("(")?;
        self.term_list(")")
    }

    fn bracket_terms(&mut self) -> Result<Vec<Term>, SyntaxError> {
        self.expect_sym("[")?;
        let ts = self.term_list("]")?;
        if ts.is_empty() {
            return self.err("empty tuple");
        }
        Ok(ts)
    }

    fn bracket_vars(&mut self) -> Result<Vec<String>, SyntaxError> {
        self.expect_sym("[")?;
        let mut out = vec![self.variable()?];
        while self.is_sym(",") {
            self.bump();
            out.push(self.variable()?);
        }
        self.expect_sym("]")?;
        Ok(out)
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.conjunction()?;
        loop {
            if self.is_kw("or") {
                self.bump();
                let right = self.conjunction()?;
                left = Formula::or(left, right);
            } else if self.is_kw("ior") {
                self.bump();
                let right = self.conjunction()?;
                left = Formula::ior(left, right);
            } else if self.is_kw("orp") {
                self.bump();
                self.expect_sym("{")?;
                let mut preserved = Vec::new();
                if !self.is_sym("}") {
                    loop {
                        preserved.push(self.bracket_terms()?);
                        if self.is_sym(";") {
                            self.bump();
                            continue;
                        }
                        break;
                    }
                }
                self.expect_sym("}")?;
                let right = self.conjunction()?;
                left = Formula::tvp(left, right, preserved);
            } else {
                return Ok(left);
            }
        }
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.unary()?;
        while self.is_kw("and") {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.is_kw("EX") {
            return self.err("relation quantifier inside the matrix; ESO formulas must be prenex");
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            let universal = self.is_kw("forall");
            self.bump();
            let x = self.variable()?;
            self.expect_sym(".")?;
            let body = self.formula()?;
            return Ok(if universal { Formula::forall(&x, body) } else { Formula::exists(&x, body) });
        }
        if self.is_kw("store") {
            self.bump();
            let from = self.bracket_terms()?;
            self.expect_sym("->")?;
            let to = self.bracket_vars()?;
            self.expect_sym(".")?;
            let body = self.formula()?;
            return Ok(Formula::Store { from, to, body: Box::new(body) });
        }
        if self.is_kw("rel") {
            self.bump();
            let var = self.variable()?;
            self.expect_sym("(")?;
            let body = self.formula()?;
            self.expect_sym(")")?;
            return Ok(Formula::Relativized { body: Box::new(body), var });
        }
        if self.is_kw("dep") && matches!(self.peek_at(1), Tok::Sym("(")) {
            self.bump();
            self.expect_sym("(")?;
            let t = self.term()?;
            self.expect_sym(")")?;
            return Ok(Formula::Dep(t));
        }
        if self.is_sym("(") {
            let quant = matches!(self.peek_at(1), Tok::Ident(k) if k == "exists" || k == "forall")
                && matches!(self.peek_at(2), Tok::Sym("["));
            if quant {
                return self.restricted();
            }
            self.bump();
            let inner = self.formula()?;
            self.expect_sym(")")?;
            return Ok(inner);
        }
        if self.is_sym("!") {
            self.bump();
            return match self.peek().clone() {
                Tok::Ident(name) if matches!(self.peek_at(1), Tok::Sym("(")) => {
                    if self.vocab.functions.contains_key(&name) || name == "dep" {
                        return self.err("negation applies only to relation atoms");
                    }
                    self.bump();
                    let args = self.paren_terms()?;
                    self.check_relation(&name, args.len())?;
                    Ok(Formula::NotRel(name, args))
                }
                _ => self.err("negation of a compound formula; formulas must be in negation normal form"),
            };
        }
        if self.is_sym("[") {
            let a = self.bracket_terms()?;
            let kind = match self.peek().clone() {
                Tok::Ident(k) if k == "sub" || k == "excl" || k == "eqext" => k,
                _ => return self.err("expected `sub`, `excl` or `eqext`"),
            };
            self.bump();
            let b = self.bracket_terms()?;
            return Ok(match kind.as_str() {
                "sub" => Formula::Inc(a, b),
                "excl" => Formula::Exc(a, b),
                _ => Formula::EquiExt(a, b),
            });
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if matches!(self.peek_at(1), Tok::Sym("(")) && !self.vocab.functions.contains_key(&name) {
                self.bump();
                let args = self.paren_terms()?;
                self.check_relation(&name, args.len())?;
                return Ok(Formula::Rel(name, args));
            }
        }
        let a = self.term()?;
        let negated = if self.is_sym("=") {
            false
        } else if self.is_sym("!=") {
            true
        } else {
            return self.err("expected `=` or `!=`");
        };
        self.bump();
        let b = self.term()?;
        Ok(if negated { Formula::NotEq(a, b) } else { Formula::Eq(a, b) })
    }

    fn restricted(&mut self) -> Result<Formula, SyntaxError> {
        self.expect_sym("(")?;
        let universal = self.is_kw("forall");
        self.bump();
        let vars = self.bracket_vars()?;
        let rel = match self.peek().clone() {
            Tok::Ident(k) => k,
            _ => return self.err("expected `sub`, `excl` or `sube`"),
        };
        let kind = match (universal, rel.as_str()) {
            (false, "sub") => Restriction::ExistsSub,
            (false, "excl") => Restriction::ExistsExcl,
            (true, "sub") => Restriction::ForallSub,
            (true, "excl") => Restriction::ForallExcl,
            (true, "sube") => Restriction::ForallSube,
            _ => return self.err(format!("`{rel}` is not a quantifier restriction here")),
        };
        self.bump();
        let bound = self.bracket_terms()?;
        self.expect_sym(")")?;
        let body = self.formula()?;
        Ok(Formula::restricted(kind, vars, bound, body))
    }

    fn check_relation(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if let Some(&declared) = self.vocab.relations.get(name) {
            if declared != arity {
                return self.err(format!("relation `{name}` has arity {declared}, applied to {arity}"));
            }
            return Ok(());
        }
        if KEYWORDS.contains(&name) {
            return self.err(format!("`{name}` is a keyword"));
        }
        match &mut self.relvars {
            None => self.err(format!("unknown relation symbol `{name}`")),
            Some(seen) => match seen.get(name) {
                Some(&declared) if declared != arity => self.err(format!(
                    "relation variable `{name}` has arity {declared}, applied to {arity}"
                )),
                Some(_) => Ok(()),
                None => {
                    seen.insert(name.to_string(), arity);
                    Ok(())
                }
            },
        }
    }
}

fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, SyntaxError> {
    parse_formula_with(text, vocab, ParseOptions::default())
}

pub fn parse_formula_with(text: &str, vocab: &Vocabulary, opts: ParseOptions) -> Result<Formula, SyntaxError> {
    vocab.validate().map_err(SyntaxError::Invalid)?;
    let mut p = Parser { toks: lex(text)?, pos: 0, vocab, opts, relvars: None };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    validate(&f)?;
    Ok(f)
}

pub fn parse_eso(text: &str, vocab: &Vocabulary) -> Result<EsoFormula, SyntaxError> {
    parse_eso_with(text, vocab, ParseOptions::default())
}

pub fn parse_eso_with(text: &str, vocab: &Vocabulary, opts: ParseOptions) -> Result<EsoFormula, SyntaxError> {
    vocab.validate().map_err(SyntaxError::Invalid)?;
    let mut p = Parser { toks: lex(text)?, pos: 0, vocab, opts, relvars: Some(BTreeMap::new()) };
    let mut quantified = Vec::new();
    while p.is_kw("EX") {
        p.bump();
        let name = match p.peek().clone() {
            Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => n,
            _ => return p.err("expected a relation variable"),
        };
        if vocab.contains_symbol(&name) {
            return p.err(format!("relation variable `{name}` clashes with a vocabulary symbol"));
        }
        p.bump();
        p.expect_sym(":")?;
        let arity = match p.bump() {
            Tok::Num(n) if n >= 1 => n,
            _ => return p.err("expected a positive arity"),
        };
        p.expect_sym(".")?;
        if let Some(seen) = &mut p.relvars {
            if seen.insert(name.clone(), arity).is_some() {
                return p.err(format!("relation variable `{name}` quantified twice"));
            }
        }
        quantified.push((name, arity));
    }
    let matrix = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    if !matrix.is_first_order() {
        return Err(SyntaxError::Invalid(
            "ESO matrix may contain only literals, and, or, exists and forall".into(),
        ));
    }
    EsoFormula::new(quantified, matrix, vocab).map_err(SyntaxError::Invalid)
}
