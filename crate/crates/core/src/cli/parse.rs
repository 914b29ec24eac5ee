use indexmap::IndexMap;
use num::{BigInt, ToPrimitive, Zero};

use super::{Command, Definition, Kind, ParseError, Session, Verb};
use crate::forms::{BiForm, Grading};
use crate::jetcore::{JetPoly, JetVar, MultiIndex, Rational, Signature};
use crate::pdesys::{OrthonomicSystem, Rule};
use crate::varcalc::SourceForm;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Eq,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Wedge,
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
            t => format!(
                "`{}`",
                match t {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Semi => ";",
                    Tok::Colon => ":",
                    Tok::Eq => "=",
                    Tok::Arrow => "->",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Slash => "/",
                    Tok::Caret => "^",
                    Tok::Wedge => "/\\",
                    _ => unreachable!(),
                }
            ),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

/// Newlines inside brackets are dropped so expressions and rule lists may
/// span lines.
fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Token>, tok| {
                out.push(Token {
                    tok,
                    line: line_no,
                    col,
                })
            };
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..=i].iter().collect();
                    push(&mut out, Tok::Int(digits.parse().expect("ascii digits")));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i + 1 < chars.len()
                        && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_')
                    {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..=i].iter().collect()));
                }
                '/' if chars.get(i + 1) == Some(&'\\') => {
                    push(&mut out, Tok::Wedge);
                    i += 1;
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 1;
                }
                '(' | '{' => {
                    depth += 1;
                    push(&mut out, if c == '(' { Tok::LParen } else { Tok::LBrace });
                }
                ')' | '}' => {
                    depth = depth.saturating_sub(1);
                    push(&mut out, if c == ')' { Tok::RParen } else { Tok::RBrace });
                }
                ',' => push(&mut out, Tok::Comma),
                ';' => push(&mut out, Tok::Semi),
                ':' => push(&mut out, Tok::Colon),
                '=' => push(&mut out, Tok::Eq),
                '+' => push(&mut out, Tok::Plus),
                '-' => push(&mut out, Tok::Minus),
                '*' => push(&mut out, Tok::Star),
                '/' => push(&mut out, Tok::Slash),
                '^' => push(&mut out, Tok::Caret),
                other => return err(line_no, col, format!("unexpected character `{other}`")),
            }
            i += 1;
        }
        if depth == 0 {
            out.push(Token {
                tok: Tok::Newline,
                line: line_no,
                col: chars.len() + 1,
            });
        }
    }
    let line = text.lines().count().max(1);
    out.push(Token {
        tok: Tok::Eof,
        line,
        col: 1,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sig: Option<Signature>,
    defs: IndexMap<String, Definition>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        err(t.line, t.col, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            self.fail(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().tok.describe()
            ))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            t => self.fail(format!("expected a name, found {}", t.describe())),
        }
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            ref t => self.fail(format!("expected end of line, found {}", t.describe())),
        }
    }

    fn sig(&self) -> Result<&Signature, ParseError> {
        match &self.sig {
            Some(s) => Ok(s),
            None => self.fail("`bundle` must come before any definition"),
        }
    }

    fn name_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut names = Vec::new();
        while !self.eat(&Tok::RParen) {
            names.push(self.ident()?);
            self.eat(&Tok::Comma);
        }
        Ok(names)
    }

    // expr := wedge (('+' | '-') wedge)*
    fn expr(&mut self) -> Result<BiForm, ParseError> {
        let mut acc = self.wedge()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc += &self.wedge()?;
            } else if self.eat(&Tok::Minus) {
                acc -= &self.wedge()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn wedge(&mut self) -> Result<BiForm, ParseError> {
        let mut acc = self.term()?;
        while self.eat(&Tok::Wedge) {
            acc = acc.wedge(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BiForm, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let at = self.peek().clone();
            if self.eat(&Tok::Star) {
                let rhs = self.unary()?;
                acc = match (acc.as_scalar(), rhs.as_scalar()) {
                    (Some(a), _) => rhs.mul_poly(&a),
                    (_, Some(b)) => acc.mul_poly(&b),
                    _ => {
                        return err(
                            at.line,
                            at.col,
                            "`*` needs a scalar factor; use `/\\` between forms",
                        )
                    }
                };
            } else if self.eat(&Tok::Slash) {
                let rhs = self.unary()?;
                match rhs.as_scalar().and_then(|p| p.as_constant()) {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    _ => return err(at.line, at.col, "can only divide by a nonzero constant"),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<BiForm, ParseError> {
        if self.eat(&Tok::Minus) {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<BiForm, ParseError> {
        let base = self.atom()?;
        let at = self.peek().clone();
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let exp = match self.next().tok {
            Tok::Int(k) => k.to_u32().ok_or_else(|| ParseError {
                line: at.line,
                col: at.col,
                message: "exponent too large".into(),
            })?,
            t => {
                return err(
                    at.line,
                    at.col,
                    format!("expected an integer exponent, found {}", t.describe()),
                )
            }
        };
        match base.as_scalar() {
            Some(p) => Ok(BiForm::scalar(p.pow(exp))),
            None => err(at.line, at.col, "only scalars can be raised to a power"),
        }
    }

    fn atom(&mut self) -> Result<BiForm, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(k) => Ok(BiForm::scalar(JetPoly::constant(Rational::from_integer(k)))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "jet" => {
                    self.pos -= 1;
                    Ok(BiForm::scalar(JetPoly::jet(self.jet()?)))
                }
                "dx" => {
                    self.expect(Tok::LParen)?;
                    let at = self.peek().clone();
                    let v = self.ident()?;
                    let i = match self.sig()?.indep_index(&v) {
                        Some(i) => i,
                        None => {
                            return err(
                                at.line,
                                at.col,
                                format!("`{v}` is not an independent variable"),
                            )
                        }
                    };
                    self.expect(Tok::RParen)?;
                    Ok(BiForm::dx(i))
                }
                "dv" => {
                    self.expect(Tok::LParen)?;
                    let w = if matches!(&self.peek().tok, Tok::Ident(s) if s == "jet") {
                        self.jet()?
                    } else {
                        self.jet_body()?
                    };
                    self.expect(Tok::RParen)?;
                    Ok(BiForm::dv(w))
                }
                _ => self.named(&name, t.line, t.col),
            },
            other => err(
                t.line,
                t.col,
                format!("expected an expression, found {}", other.describe()),
            ),
        }
    }

    fn named(&self, name: &str, line: usize, col: usize) -> Result<BiForm, ParseError> {
        let sig = self.sig()?;
        if let Some(i) = sig.indep_index(name) {
            return Ok(BiForm::scalar(JetPoly::x(i)));
        }
        if let Some(a) = sig.dep_index(name) {
            return Ok(BiForm::scalar(JetPoly::jet(JetVar::field(a))));
        }
        match self.defs.get(name) {
            Some(Definition::Lagrangian(f)) | Some(Definition::Form(f)) => Ok(f.clone()),
            Some(Definition::Source(s)) => Ok(s.to_biform(sig)),
            Some(Definition::System(_)) => err(
                line,
                col,
                format!("system `{name}` cannot be used in an expression"),
            ),
            None => err(line, col, format!("unknown name `{name}`")),
        }
    }

    // jet := "jet" "(" body ")"
    fn jet(&mut self) -> Result<JetVar, ParseError> {
        let kw = self.next();
        if kw.tok != Tok::Ident("jet".into()) {
            return err(
                kw.line,
                kw.col,
                format!("expected `jet`, found {}", kw.tok.describe()),
            );
        }
        self.expect(Tok::LParen)?;
        let w = self.jet_body()?;
        self.expect(Tok::RParen)?;
        Ok(w)
    }

    // body := dep (";" indep ("," indep)*)?
    fn jet_body(&mut self) -> Result<JetVar, ParseError> {
        let at = self.peek().clone();
        let dep = match &at.tok {
            Tok::Ident(s) => s.clone(),
            t => {
                return err(
                    at.line,
                    at.col,
                    format!("expected a dependent variable, found {}", t.describe()),
                )
            }
        };
        self.next();
        let sig = self.sig()?;
        let Some(a) = sig.dep_index(&dep) else {
            return err(
                at.line,
                at.col,
                format!("`{dep}` is not a dependent variable"),
            );
        };
        let mut idx = Vec::new();
        if self.eat(&Tok::Semi) {
            while self.peek().tok != Tok::RParen {
                let at = self.peek().clone();
                let v = self.ident()?;
                match self.sig()?.indep_index(&v) {
                    Some(i) => idx.push(i),
                    None => {
                        return err(
                            at.line,
                            at.col,
                            format!("`{v}` is not an independent variable"),
                        )
                    }
                }
                self.eat(&Tok::Comma);
            }
        }
        Ok(JetVar::new(a, MultiIndex::from_indices(idx)))
    }
}

fn check_kind(
    sig: &Signature,
    kind: Kind,
    value: BiForm,
    line: usize,
    col: usize,
) -> Result<Definition, ParseError> {
    let n = sig.n();
    let graded = |g| {
        value.expect_grading(g).map_err(|e| ParseError {
            line,
            col,
            message: e.to_string(),
        })
    };
    match kind {
        Kind::Lagrangian => {
            graded(Grading::new(n, 0))?;
            Ok(Definition::Lagrangian(value))
        }
        Kind::Source => {
            graded(Grading::new(n, 1))?;
            SourceForm::from_biform(sig, &value)
                .map(Definition::Source)
                .map_err(|e| ParseError {
                    line,
                    col,
                    message: e.to_string(),
                })
        }
        Kind::Form => {
            if value.grading().is_none() && !value.is_zero() {
                return err(line, col, "form is not homogeneous");
            }
            Ok(Definition::Form(value))
        }
        Kind::System => unreachable!("systems are parsed by `sys`"),
    }
}

/// Parses a whole session.
pub fn parse_session(text: &str) -> Result<Session, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig: None,
        defs: IndexMap::new(),
    };
    let mut commands = Vec::new();
    loop {
        while p.eat(&Tok::Newline) {}
        let start = p.peek().clone();
        let keyword = match &start.tok {
            Tok::Eof => break,
            Tok::Ident(s) => s.clone(),
            t => {
                return err(
                    start.line,
                    start.col,
                    format!("expected a statement, found {}", t.describe()),
                )
            }
        };
        p.next();
        match keyword.as_str() {
            "bundle" => {
                if p.sig.is_some() {
                    return err(start.line, start.col, "duplicate `bundle`");
                }
                let indep = p.name_list()?;
                let dep = p.name_list()?;
                p.end_of_statement()?;
                let s = Signature::new(indep, dep).map_err(|e| ParseError {
                    line: start.line,
                    col: start.col,
                    message: e.to_string(),
                })?;
                p.sig = Some(s);
            }
            "def" => {
                let at = p.peek().clone();
                let name = p.ident()?;
                p.expect(Tok::Colon)?;
                let kat = p.peek().clone();
                let kind = match p.ident()?.as_str() {
                    "lag" => Kind::Lagrangian,
                    "form" => Kind::Form,
                    "src" => Kind::Source,
                    other => {
                        return err(
                            kat.line,
                            kat.col,
                            format!("unknown kind `{other}`, expected lag, form or src"),
                        )
                    }
                };
                p.expect(Tok::Eq)?;
                let value = p.expr()?;
                p.end_of_statement()?;
                let s = p.sig()?.clone();
                if p.defs.contains_key(&name) || is_reserved(&s, &name) {
                    return err(at.line, at.col, format!("name `{name}` is already taken"));
                }
                let def = check_kind(&s, kind, value, at.line, at.col)?;
                p.defs.insert(name, def);
            }
            "sys" => {
                let at = p.peek().clone();
                let name = p.ident()?;
                p.expect(Tok::LBrace)?;
                let mut rules = Vec::new();
                loop {
                    if p.eat(&Tok::RBrace) {
                        break;
                    }
                    let lead = if matches!(&p.peek().tok, Tok::Ident(s) if s == "jet") {
                        p.jet()?
                    } else {
                        p.jet_body()?
                    };
                    p.expect(Tok::Arrow)?;
                    let rat = p.peek().clone();
                    let rhs = p.expr()?;
                    let Some(rhs) = rhs.as_scalar() else {
                        return err(rat.line, rat.col, "right-hand side must be a scalar");
                    };
                    rules.push(Rule::new(lead, rhs));
                    if !p.eat(&Tok::Comma) {
                        p.expect(Tok::RBrace)?;
                        break;
                    }
                }
                p.end_of_statement()?;
                let s = p.sig()?.clone();
                if p.defs.contains_key(&name) || is_reserved(&s, &name) {
                    return err(at.line, at.col, format!("name `{name}` is already taken"));
                }
                let sys = OrthonomicSystem::new(&s, rules).map_err(|e| ParseError {
                    line: at.line,
                    col: at.col,
                    message: e.to_string(),
                })?;
                p.defs.insert(name, Definition::System(sys));
            }
            "cmd" => {
                let vat = p.peek().clone();
                let vname = p.ident()?;
                let Some(verb) = Verb::from_name(&vname) else {
                    return err(vat.line, vat.col, format!("unknown command `{vname}`"));
                };
                let mut args = Vec::new();
                let mut spots = Vec::new();
                while let Tok::Ident(_) = p.peek().tok {
                    spots.push(p.peek().clone());
                    args.push(p.ident()?);
                }
                p.end_of_statement()?;
                let want = verb.arguments();
                if args.len() != want.len() {
                    return err(
                        vat.line,
                        vat.col,
                        format!(
                            "`{}` takes {} argument(s), found {}",
                            verb.name(),
                            want.len(),
                            args.len()
                        ),
                    );
                }
                for ((arg, spot), kind) in args.iter().zip(&spots).zip(want) {
                    let Some(def) = p.defs.get(arg) else {
                        return err(spot.line, spot.col, format!("unknown name `{arg}`"));
                    };
                    let ok = match kind {
                        Some(k) => def.kind() == *k,
                        None => def.kind() != Kind::System,
                    };
                    if !ok {
                        let expected =
                            kind.map_or("a form".to_string(), |k| format!("a `{k}` definition"));
                        return err(
                            spot.line,
                            spot.col,
                            format!(
                                "`{arg}` is a `{}` definition, expected {expected}",
                                def.kind()
                            ),
                        );
                    }
                }
                commands.push(Command {
                    verb,
                    args,
                    line: vat.line,
                });
            }
            other => {
                return err(
                    start.line,
                    start.col,
                    format!("unknown statement `{other}`"),
                )
            }
        }
    }
    match p.sig {
        Some(signature) => Ok(Session {
            signature,
            defs: p.defs,
            commands,
        }),
        None => err(1, 1, "missing `bundle` declaration"),
    }
}

fn is_reserved(sig: &Signature, name: &str) -> bool {
    matches!(name, "jet" | "dx" | "dv")
        || sig.indep_index(name).is_some()
        || sig.dep_index(name).is_some()
}

/// Parses one expression against a signature and earlier definitions.
pub fn parse_expr(
    sig: &Signature,
    defs: &IndexMap<String, Definition>,
    text: &str,
) -> Result<BiForm, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        sig: Some(sig.clone()),
        defs: defs.clone(),
    };
    let e = p.expr()?;
    while p.eat(&Tok::Newline) {}
    if p.peek().tok != Tok::Eof {
        return p.fail(format!("unexpected {}", p.peek().tok.describe()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcore::rat;

    fn session(text: &str) -> Session {
        parse_session(text).unwrap()
    }

    #[test]
    fn lagrangian_definition() {
        let s = session("bundle (t) (u)\ndef L : lag = 1/2*jet(u;t)^2 /\\ dx(t)\n");
        let Definition::Lagrangian(l) = &s.defs["L"] else {
            panic!()
        };
        let ut = JetPoly::jet(JetVar::new(0, MultiIndex::from_indices([0])));
        assert_eq!(l, &BiForm::dx(0).mul_poly(&ut.pow(2).scale(&rat(1, 2))));
    }

    #[test]
    fn system_definition() {
        let s = session("bundle (t) (u)\nsys osc { jet(u;t,t) -> 0 - jet(u) }\n");
        let Definition::System(sys) = &s.defs["osc"] else {
            panic!()
        };
        assert_eq!(sys.rules().len(), 1);
        assert_eq!(
            sys.rules()[0].lead,
            JetVar::new(0, MultiIndex::from_indices([0, 0]))
        );
        assert_eq!(sys.rules()[0].rhs, -JetPoly::jet(JetVar::field(0)));
    }

    #[test]
    fn precedence() {
        let s = Signature::new(["t"], ["u"]).unwrap();
        let defs = IndexMap::new();
        let u = JetPoly::jet(JetVar::field(0));
        assert_eq!(
            parse_expr(&s, &defs, "-u^2 + 2*u").unwrap(),
            BiForm::scalar(&-u.pow(2) + &u.scale(&rat(2, 1)))
        );
        assert_eq!(
            parse_expr(&s, &defs, "u * dv(u) /\\ dv(u;t) + dv(jet(u;t)) /\\ dv(u)").unwrap(),
            BiForm::dv(JetVar::field(0))
                .wedge(&BiForm::dv(JetVar::new(0, MultiIndex::from_indices([0]))))
                .mul_poly(&(&u - &JetPoly::one()))
        );
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_session("bundle (t) (u)\ndef W : form = dv(dx(t))\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 19));
        let e = parse_session("bundle (t) (u)\ndef L : lag = dv(u)\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("grading"));
        let e = parse_session("bundle (t) (u)\ncmd el L\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 8));
        let e = parse_session("bundle (t) (u)\ndef X : form = u $ u\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 18));
    }
}
