use num::{One, Signed};
use serde_json::{json, Value as Json};

use crate::forms::{Basis, BiForm};
use crate::jetcore::{JetPoly, JetVar, Monomial, Rational, Signature, Var};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Latex,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(format!(
                "unknown format `{other}`, expected text, latex or json"
            )),
        }
    }
}

/// A named result value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Form(BiForm),
    Scalar(JetPoly),
}

trait Style {
    fn rational(&self, q: &Rational) -> String;
    fn indep(&self, sig: &Signature, i: usize) -> String;
    fn jet(&self, sig: &Signature, w: &JetVar) -> String;
    fn power(&self, base: String, k: u32) -> String;
    fn times(&self) -> &'static str;
    /// Between a coefficient and a basis form.
    fn scale_sep(&self) -> &'static str;
    fn dx(&self, sig: &Signature, i: usize) -> String;
    fn dv(&self, sig: &Signature, w: &JetVar) -> String;
    fn wedge(&self) -> &'static str;
    fn group(&self, inner: String) -> String;
}

struct Text;
struct Latex;

fn index_names(sig: &Signature, w: &JetVar) -> Vec<String> {
    w.idx
        .indices()
        .iter()
        .map(|&i| sig.indep_names()[i].clone())
        .collect()
}

impl Style for Text {
    fn rational(&self, q: &Rational) -> String {
        q.to_string()
    }
    fn indep(&self, sig: &Signature, i: usize) -> String {
        sig.indep_names()[i].clone()
    }
    fn jet(&self, sig: &Signature, w: &JetVar) -> String {
        let dep = &sig.dep_names()[w.dep];
        if w.idx.is_empty() {
            dep.clone()
        } else {
            format!("jet({dep};{})", index_names(sig, w).join(","))
        }
    }
    fn power(&self, base: String, k: u32) -> String {
        format!("{base}^{k}")
    }
    fn times(&self) -> &'static str {
        "*"
    }
    fn scale_sep(&self) -> &'static str {
        " * "
    }
    fn dx(&self, sig: &Signature, i: usize) -> String {
        format!("dx({})", sig.indep_names()[i])
    }
    fn dv(&self, sig: &Signature, w: &JetVar) -> String {
        let dep = &sig.dep_names()[w.dep];
        if w.idx.is_empty() {
            format!("dv({dep})")
        } else {
            format!("dv({dep};{})", index_names(sig, w).join(","))
        }
    }
    fn wedge(&self) -> &'static str {
        " /\\ "
    }
    fn group(&self, inner: String) -> String {
        format!("({inner})")
    }
}

impl Style for Latex {
    fn rational(&self, q: &Rational) -> String {
        if q.is_integer() {
            q.to_string()
        } else {
            let sign = if q.is_negative() { "-" } else { "" };
            format!("{sign}\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom())
        }
    }
    fn indep(&self, sig: &Signature, i: usize) -> String {
        sig.indep_names()[i].clone()
    }
    fn jet(&self, sig: &Signature, w: &JetVar) -> String {
        let dep = &sig.dep_names()[w.dep];
        if w.idx.is_empty() {
            dep.clone()
        } else {
            let compact = sig.indep_names().iter().all(|s| s.chars().count() == 1);
            format!(
                "{dep}_{{{}}}",
                index_names(sig, w).join(if compact { "" } else { "," })
            )
        }
    }
    fn power(&self, base: String, k: u32) -> String {
        format!("{base}^{{{k}}}")
    }
    fn times(&self) -> &'static str {
        " "
    }
    fn scale_sep(&self) -> &'static str {
        "\\,"
    }
    fn dx(&self, sig: &Signature, i: usize) -> String {
        format!("\\mathrm{{d}}{}", sig.indep_names()[i])
    }
    fn dv(&self, sig: &Signature, w: &JetVar) -> String {
        format!("\\delta {}", self.jet(sig, w))
    }
    fn wedge(&self) -> &'static str {
        " \\wedge "
    }
    fn group(&self, inner: String) -> String {
        format!("\\left({inner}\\right)")
    }
}

fn monomial(style: &dyn Style, sig: &Signature, m: &Monomial) -> String {
    let parts: Vec<String> = m
        .factors()
        .iter()
        .map(|(v, k)| {
            let base = match v {
                Var::Indep(i) => style.indep(sig, *i),
                Var::Jet(w) => style.jet(sig, w),
            };
            if *k == 1 {
                base
            } else {
                style.power(base, *k)
            }
        })
        .collect();
    parts.join(style.times())
}

/// `|c|·m`, with the unit coefficient or monomial left out.
fn magnitude(style: &dyn Style, sig: &Signature, m: &Monomial, c: &Rational) -> String {
    let c = c.abs();
    match (m.is_one(), c.is_one()) {
        (true, _) => style.rational(&c),
        (false, true) => monomial(style, sig, m),
        (false, false) => format!(
            "{}{}{}",
            style.rational(&c),
            style.times(),
            monomial(style, sig, m)
        ),
    }
}

fn join_signed(items: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (k, (negative, body)) in items.into_iter().enumerate() {
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn poly_with(style: &dyn Style, sig: &Signature, p: &JetPoly) -> String {
    join_signed(
        p.terms()
            .map(|(m, c)| (c.is_negative(), magnitude(style, sig, m, c))),
    )
}

fn basis_with(style: &dyn Style, sig: &Signature, b: &Basis) -> String {
    let h = b.h.iter().map(|&i| style.dx(sig, i));
    let v = b.v.iter().map(|w| style.dv(sig, w));
    h.chain(v).collect::<Vec<_>>().join(style.wedge())
}

fn form_with(style: &dyn Style, sig: &Signature, f: &BiForm) -> String {
    let mut items = Vec::new();
    for (b, c) in f.terms() {
        if b.h.is_empty() && b.v.is_empty() {
            items.extend(
                c.terms()
                    .map(|(m, q)| (q.is_negative(), magnitude(style, sig, m, q))),
            );
            continue;
        }
        let basis = basis_with(style, sig, b);
        if c.len() == 1 {
            let (m, q) = c.terms().next().expect("one term");
            let body = if m.is_one() && q.abs().is_one() {
                basis
            } else {
                format!(
                    "{}{}{basis}",
                    magnitude(style, sig, m, q),
                    style.scale_sep()
                )
            };
            items.push((q.is_negative(), body));
        } else {
            items.push((
                false,
                format!(
                    "{}{}{basis}",
                    style.group(poly_with(style, sig, c)),
                    style.scale_sep()
                ),
            ));
        }
    }
    join_signed(items)
}

pub fn render_poly(sig: &Signature, p: &JetPoly, format: Format) -> String {
    match format {
        Format::Latex => poly_with(&Latex, sig, p),
        _ => poly_with(&Text, sig, p),
    }
}

pub fn render_form(sig: &Signature, f: &BiForm, format: Format) -> String {
    match format {
        Format::Latex => form_with(&Latex, sig, f),
        _ => form_with(&Text, sig, f),
    }
}

fn json_jet(sig: &Signature, w: &JetVar) -> Json {
    json!({ "dep": sig.dep_names()[w.dep], "idx": w.idx.counts(sig.n()) })
}

fn json_terms(sig: &Signature, basis: &Basis, c: &JetPoly) -> Vec<Json> {
    c.terms()
        .map(|(m, q)| {
            let factors: Vec<Json> = m
                .factors()
                .iter()
                .map(|(v, k)| match v {
                    Var::Indep(i) => json!({ "indep": sig.indep_names()[*i], "pow": k }),
                    Var::Jet(w) => json!({ "jet": json_jet(sig, w), "pow": k }),
                })
                .collect();
            json!({
                "coeff": q.to_string(),
                "monomial": factors,
                "hgen": basis.h.iter().map(|&i| sig.indep_names()[i].clone()).collect::<Vec<_>>(),
                "vgen": basis.v.iter().map(|w| json_jet(sig, w)).collect::<Vec<_>>(),
            })
        })
        .collect()
}

/// JSON description of one value.
pub fn value_json(sig: &Signature, name: &str, v: &Value) -> Json {
    match v {
        Value::Form(f) => {
            let terms: Vec<Json> = f.terms().flat_map(|(b, c)| json_terms(sig, b, c)).collect();
            let grading = f.grading().map(|g| json!([g.h, g.v])).unwrap_or(Json::Null);
            json!({ "name": name, "kind": "form", "grading": grading, "terms": terms })
        }
        Value::Scalar(p) => {
            let terms = json_terms(sig, &Basis::one(), p);
            json!({ "name": name, "kind": "scalar", "grading": [0, 0], "terms": terms })
        }
    }
}

/// One value in a text or LaTeX format.
pub fn render(sig: &Signature, v: &Value, format: Format) -> String {
    match (v, format) {
        (_, Format::Json) => value_json(sig, "", v).to_string(),
        (Value::Form(f), _) => render_form(sig, f, format),
        (Value::Scalar(p), _) => render_poly(sig, p, format),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcore::{rat, MultiIndex};

    fn sig() -> Signature {
        Signature::new(["t"], ["u"]).unwrap()
    }

    fn w(idx: &[usize]) -> JetVar {
        JetVar::new(0, MultiIndex::from_indices(idx.iter().copied()))
    }

    #[test]
    fn text_examples() {
        let s = sig();
        let f = BiForm::dv(w(&[0])).wedge(&BiForm::dv(w(&[])));
        assert_eq!(render_form(&s, &f, Format::Text), "-dv(u) /\\ dv(u;t)");
        assert_eq!(render_form(&s, &BiForm::zero(), Format::Text), "0");
        let l = BiForm::dx(0).mul_poly(&JetPoly::jet(w(&[0])).pow(2).scale(&rat(1, 2)));
        assert_eq!(render_form(&s, &l, Format::Text), "1/2*jet(u;t)^2 * dx(t)");
        let p = &JetPoly::jet(w(&[0, 0])) + &JetPoly::jet(w(&[]));
        assert_eq!(
            render_form(&s, &BiForm::dx(0).mul_poly(&p), Format::Text),
            "(u + jet(u;t,t)) * dx(t)"
        );
    }

    #[test]
    fn latex_uses_fractions() {
        let s = sig();
        let l = BiForm::dx(0).mul_poly(&JetPoly::jet(w(&[0])).pow(2).scale(&rat(1, 2)));
        let tex = render_form(&s, &l, Format::Latex);
        assert!(tex.contains("\\frac{1}{2}"), "{tex}");
    }

    #[test]
    fn json_schema_fields() {
        let s = sig();
        let j = value_json(
            &s,
            "W",
            &Value::Form(BiForm::dv(w(&[0])).mul_poly(&JetPoly::jet(w(&[])))),
        );
        assert_eq!(j["kind"], "form");
        assert_eq!(j["grading"], json!([0, 1]));
        assert_eq!(j["terms"][0]["coeff"], "1");
        assert_eq!(j["terms"][0]["vgen"][0], json!({"dep": "u", "idx": [1]}));
    }
}
