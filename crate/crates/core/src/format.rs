//! Text format for systems and homomorphisms, plus JSON emission.
//!
//! ```text
//! (CONDITIONTYPE ORIENTED)
//! (VAR x y)
//! (RULES
//!   f(x) -> x | x == e
//! )
//! (COMMENT free text)
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::homo::Homomorphism;
use crate::system::{default_label, Condition, Flavor, Rule, System, SystemError};
use crate::term::{sym, Sym, Term, FRESH_SEP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("lexical error at byte {pos}: {msg}")]
    Lexical { pos: usize, msg: String },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("reserved character `#` in identifier `{0}`")]
    ReservedHash(String),
    #[error("more than one CONDITIONTYPE declaration")]
    DuplicateConditionType,
    #[error("{0}")]
    System(#[from] SystemError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Arrow,
    Bar,
    EqEq,
    Ident(String),
    /// Raw text of a COMMENT block (the block's closing paren is consumed).
    Comment(String),
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '^' | '-')
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push((pos, Tok::LParen));
            i += 1;
            // COMMENT blocks hold arbitrary balanced text.
            let mut j = i;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            let kw: String = chars[j..].iter().take(7).map(|&(_, c)| c).collect();
            let after = chars.get(j + 7).map(|&(_, c)| c);
            if kw == "COMMENT" && !after.is_some_and(is_ident_char) {
                let mut k = j + 7;
                let mut depth = 1usize;
                let start = k;
                while k < chars.len() {
                    match chars[k].1 {
                        '(' => depth += 1,
                        ')' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    k += 1;
                }
                if depth != 0 {
                    return Err(ParseError::Lexical { pos, msg: "unterminated COMMENT block".into() });
                }
                let body: String = chars[start..k].iter().map(|&(_, c)| c).collect();
                out.push((chars[j].0, Tok::Ident("COMMENT".into())));
                out.push((chars[start.min(chars.len() - 1)].0, Tok::Comment(body.trim().to_string())));
                out.push((chars[k].0, Tok::RParen));
                i = k + 1;
            }
        } else if c == ')' {
            out.push((pos, Tok::RParen));
            i += 1;
        } else if c == ',' {
            out.push((pos, Tok::Comma));
            i += 1;
        } else if c == '|' {
            out.push((pos, Tok::Bar));
            i += 1;
        } else if c == '-' && next == Some('>') {
            out.push((pos, Tok::Arrow));
            i += 2;
        } else if c == '=' && next == Some('=') {
            out.push((pos, Tok::EqEq));
            i += 2;
        } else if c == '#' {
            let mut j = i;
            while j < chars.len() && (is_ident_char(chars[j].1) || chars[j].1 == '#') {
                j += 1;
            }
            let word: String = chars[i..j].iter().map(|&(_, c)| c).collect();
            return Err(ParseError::ReservedHash(word));
        } else if is_ident_char(c) {
            let mut j = i;
            let mut word = String::new();
            while j < chars.len() {
                let ch = chars[j].1;
                if ch == '-' && chars.get(j + 1).map(|&(_, c)| c) == Some('>') {
                    break;
                }
                if ch == '#' {
                    let mut k = j;
                    while k < chars.len() && (is_ident_char(chars[k].1) || chars[k].1 == '#') {
                        k += 1;
                    }
                    let w: String = chars[i..k].iter().map(|&(_, c)| c).collect();
                    return Err(ParseError::ReservedHash(w));
                }
                if !is_ident_char(ch) {
                    break;
                }
                word.push(ch);
                j += 1;
            }
            out.push((pos, Tok::Ident(word)));
            i = j;
        } else {
            return Err(ParseError::Lexical { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    vars: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.ident()?;
        if self.peek() == Some(&Tok::LParen) {
            if self.vars.contains(&name) {
                return Err(ParseError::System(SystemError::VarAsFunction(name)));
            }
            self.i += 1;
            let mut args = vec![self.term()?];
            while self.peek() == Some(&Tok::Comma) {
                self.i += 1;
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`)` closing argument list")?;
            Ok(Term::App(sym(&name), args))
        } else if self.vars.contains(&name) {
            Ok(Term::Var(sym(&name)))
        } else {
            Ok(Term::App(sym(&name), Vec::new()))
        }
    }

    fn rule(&mut self, index: usize) -> Result<Rule, ParseError> {
        let lhs = self.term()?;
        self.expect(Tok::Arrow, "`->`")?;
        let rhs = self.term()?;
        let mut conds = Vec::new();
        if self.peek() == Some(&Tok::Bar) {
            self.i += 1;
            loop {
                let s = self.term()?;
                self.expect(Tok::EqEq, "`==` in condition")?;
                let t = self.term()?;
                conds.push(Condition::new(s, t));
                if self.peek() == Some(&Tok::Comma) {
                    self.i += 1;
                } else {
                    break;
                }
            }
        }
        Ok(Rule::new(&default_label(index), lhs, rhs, conds))
    }
}

/// Pre-scan for `(VAR ...)` declarations so that block order does not matter.
fn declared_vars(toks: &[(usize, Tok)]) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    let mut i = 0;
    while i + 1 < toks.len() {
        if toks[i].1 == Tok::LParen && toks[i + 1].1 == Tok::Ident("VAR".into()) {
            let mut j = i + 2;
            while let Some((_, Tok::Ident(v))) = toks.get(j) {
                vars.insert(v.clone());
                j += 1;
            }
            i = j;
        } else {
            i += 1;
        }
    }
    vars
}

/// Parses a system in the block format.
pub fn parse_system(text: &str) -> Result<System, ParseError> {
    let (sys, _) = parse_file(text)?;
    Ok(sys)
}

/// Parses a file that may also contain `(MAP ...)` homomorphism blocks.
pub fn parse_file(text: &str) -> Result<(System, Option<Homomorphism>), ParseError> {
    let toks = lex(text)?;
    let vars = declared_vars(&toks);
    let mut p = Parser { toks, i: 0, end: text.len(), vars: vars.clone() };
    let mut flavor: Option<Flavor> = None;
    let mut rules = Vec::new();
    let mut origin = String::new();
    let mut map: Option<Homomorphism> = None;
    while p.peek().is_some() {
        p.expect(Tok::LParen, "`(` starting a declaration")?;
        let kw = p.ident()?;
        match kw.as_str() {
            "CONDITIONTYPE" => {
                if flavor.is_some() {
                    return Err(ParseError::DuplicateConditionType);
                }
                flavor = Some(match p.ident()?.as_str() {
                    "ORIENTED" => Flavor::Oriented,
                    "JOIN" => Flavor::Join,
                    other => return p.err(format!("unknown condition type `{other}`")),
                });
            }
            "VAR" => {
                while let Some(Tok::Ident(_)) = p.peek() {
                    p.i += 1;
                }
            }
            "RULES" => {
                while let Some(Tok::Ident(_)) = p.peek() {
                    let r = p.rule(rules.len() + 1)?;
                    rules.push(r);
                }
            }
            "COMMENT" => {
                if let Some(Tok::Comment(c)) = p.peek() {
                    origin = c.clone();
                    p.i += 1;
                }
            }
            "MAP" => {
                let h = map.get_or_insert_with(Homomorphism::identity);
                while let Some(Tok::Ident(_)) = p.peek() {
                    parse_map_entry(&mut p, h)?;
                }
            }
            other => return p.err(format!("unknown declaration `{other}`")),
        }
        p.expect(Tok::RParen, "`)` closing the declaration")?;
    }
    let mut sys = System::new(rules, flavor.unwrap_or_default());
    sys.vars = vars.iter().map(|v| sym(v)).collect();
    sys.origin = origin;
    sys.signature()?;
    Ok((sys, map))
}

fn parse_map_entry(p: &mut Parser, h: &mut Homomorphism) -> Result<(), ParseError> {
    let f = p.ident()?;
    let mut params = Vec::new();
    if p.peek() == Some(&Tok::LParen) {
        p.i += 1;
        params.push(p.ident()?);
        while p.peek() == Some(&Tok::Comma) {
            p.i += 1;
            params.push(p.ident()?);
        }
        p.expect(Tok::RParen, "`)` closing MAP parameters")?;
    }
    p.expect(Tok::Arrow, "`->` in MAP entry")?;
    let saved = std::mem::replace(&mut p.vars, params.iter().cloned().collect());
    let pat = p.term();
    p.vars = saved;
    let pat = pat?;
    let canon: BTreeMap<Sym, Sym> =
        params.iter().enumerate().map(|(i, x)| (sym(x), sym(&format!("x{}", i + 1)))).collect();
    let pat = pat.map_vars(&mut |x| canon.get(x).cloned().unwrap_or_else(|| x.clone()));
    h.set(sym(&f), params.len(), pat);
    Ok(())
}

/// Parses a single term; identifiers in `vars` are variables.
pub fn parse_term(text: &str, vars: &BTreeSet<Sym>) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0, end: text.len(), vars: vars.iter().map(|v| v.to_string()).collect() };
    let t = p.term()?;
    if p.peek().is_some() {
        return p.err("trailing input after term");
    }
    Ok(t)
}

/// Parses a term using the variables of `sys`.
pub fn parse_term_in(text: &str, sys: &System) -> Result<Term, ParseError> {
    let mut vars = sys.vars.clone();
    vars.extend(sys.used_vars());
    parse_term(text, &vars)
}

/// Renders a system; `parse_system(render_system(s))` reproduces the rules.
pub fn render_system(sys: &System) -> String {
    let mut out = String::new();
    if sys.flavor == Flavor::Join {
        out.push_str("(CONDITIONTYPE JOIN)\n");
    }
    let mut vars = sys.vars.clone();
    vars.extend(sys.used_vars());
    if !vars.is_empty() {
        let v: Vec<&str> = vars.iter().map(|s| &**s).collect();
        out.push_str(&format!("(VAR {})\n", v.join(" ")));
    }
    out.push_str("(RULES\n");
    for r in &sys.rules {
        out.push_str("  ");
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out.push(')');
    if !sys.origin.is_empty() {
        out.push_str(&format!("\n(COMMENT {})", sys.origin));
    }
    out
}

/// Renders a homomorphism as a `(MAP ...)` block, listing only explicit entries.
pub fn render_map(h: &Homomorphism) -> String {
    let mut out = String::from("(MAP\n");
    for (f, (n, pat)) in h.entries() {
        let lhs = Term::App(f.clone(), (1..=*n).map(|i| Term::var(&format!("x{i}"))).collect());
        out.push_str(&format!("  {lhs} -> {pat}\n"));
    }
    out.push(')');
    out
}

/// Serializes any report to pretty JSON.
pub fn emit_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

/// True when `name` contains the reserved fresh-name separator.
pub fn is_internal_name(name: &str) -> bool {
    name.contains(FRESH_SEP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_r3_first_rule() {
        let s = parse_system("(VAR x)(RULES f(x) -> x | x == e)").unwrap();
        assert_eq!(s.rules.len(), 1);
        assert_eq!(s.flavor, Flavor::Oriented);
        assert_eq!(s.rules[0].to_string(), "f(x) -> x | x == e");
        assert!(s.rules[0].rhs.is_var());
        assert!(!s.rules[0].conds[0].rhs.is_var());
    }

    #[test]
    fn parse_empty_and_errors() {
        assert!(parse_system("(RULES )").unwrap().rules.is_empty());
        assert!(matches!(
            parse_system("(VAR x)(RULES f(x,x) -> x  f(x) -> x)"),
            Err(ParseError::System(SystemError::ArityClash { .. }))
        ));
        assert!(matches!(parse_system("(VAR x)(RULES x(a) -> a)"), Err(ParseError::System(SystemError::VarAsFunction(_)))));
        assert!(matches!(parse_system("(RULES a#1 -> b)"), Err(ParseError::ReservedHash(_))));
        assert!(matches!(parse_system("(RULES a -> $)"), Err(ParseError::Lexical { .. })));
        assert!(matches!(parse_system("(RULES a -> )"), Err(ParseError::Syntax { .. })));
        assert_eq!(
            parse_system("(CONDITIONTYPE JOIN)(CONDITIONTYPE ORIENTED)(RULES)"),
            Err(ParseError::DuplicateConditionType)
        );
    }

    #[test]
    fn arrow_without_spaces() {
        let s = parse_system("(VAR x y)(RULES f(x)->x  g(x,y)->y|x==y)").unwrap();
        assert_eq!(s.rules.len(), 2);
        assert_eq!(s.rules[1].conds.len(), 1);
    }

    #[test]
    fn render_empty() {
        assert_eq!(render_system(&parse_system("(RULES )").unwrap()), "(RULES\n)");
    }

    #[test]
    fn comment_roundtrip() {
        let s = parse_system("(RULES a -> b)(COMMENT from (somewhere) else)").unwrap();
        assert_eq!(s.origin, "from (somewhere) else");
        let back = parse_system(&render_system(&s)).unwrap();
        assert_eq!(back.origin, s.origin);
        assert_eq!(back, s);
    }

    #[test]
    fn map_block() {
        let (_, h) = parse_file("(RULES a -> b)(MAP U(y, z) -> V(z)  f(x) -> a)").unwrap();
        let h = h.unwrap();
        assert_eq!(h.entries().len(), 2);
        assert_eq!(h.entries()[&sym("U")].1, Term::app("V", vec![Term::var("x2")]));
        let text = render_map(&h);
        let (_, h2) = parse_file(&format!("(RULES){text}")).unwrap();
        assert_eq!(h2.unwrap().entries(), h.entries());
    }
}
