//! JSON file formats for number fields, points, operators, automata,
//! functions and relations.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::efunc::{efunction, EFunction};
use crate::error::{Error, Result};
use crate::field::{NfElem, NumberField};
use crate::mahler::{AutomatonSeq, MahlerFunction, SigmaEquation};
use crate::ore::{Kind, KRat, Operator, PowerSeries};
use crate::poly::parse::{format_poly, format_ratfunc, parse_expression, parse_poly, parse_qpoly};
use crate::poly::{KPoly, Monomial, MultiPoly, Var};
use crate::relations::RelationPoly;

/// Version stamped on every report and file written.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NumberFieldJson {
    pub minpoly: String,
    #[serde(default)]
    pub embedding_index: usize,
}

pub fn field_from_json(j: &NumberFieldJson) -> Result<Arc<NumberField>> {
    NumberField::with_embedding(parse_qpoly(&j.minpoly, 'x')?, Some(j.embedding_index))
}

pub fn field_to_json(k: &NumberField) -> NumberFieldJson {
    NumberFieldJson {
        minpoly: crate::poly::parse::format_terms(k.minpoly().coeffs(), "x"),
        embedding_index: k.embedding_index(),
    }
}

/// Field element written in the grammar with generator `t`.
pub fn parse_element(text: &str, field: Option<&Arc<NumberField>>) -> Result<NfElem> {
    let p = parse_poly(text, field)?;
    if p.deg() > 0 {
        return Err(Error::InvalidInput(format!("`{text}` depends on z")));
    }
    Ok(p.coeff(0))
}

/// Named algebraic point.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<NumberFieldJson>,
    /// Value in the grammar, `t` denoting the field generator.
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn point_from_json(j: &PointJson) -> Result<(Option<Arc<NumberField>>, NfElem)> {
    let field = j.field.as_ref().map(field_from_json).transpose()?;
    let v = parse_element(&j.value, field.as_ref())?;
    Ok((field, v))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub coeffs: Vec<String>,
}

pub fn kind_from(kind: &str, q: Option<u64>) -> Result<Kind> {
    match (kind, q) {
        ("sigma", Some(q)) if q >= 2 => Ok(Kind::Sigma(q)),
        ("sigma", _) => Err(Error::InvalidInput("sigma kind needs a base q >= 2".into())),
        ("delta", _) => Ok(Kind::Delta),
        (other, _) => Err(Error::InvalidInput(format!("unknown kind `{other}`"))),
    }
}

pub fn operator_from_json(j: &OperatorJson, field: Option<&Arc<NumberField>>) -> Result<Operator> {
    let kind = kind_from(&j.kind, j.q)?;
    let cs = j.coeffs.iter().map(|c| parse_expression(c, field)).collect::<Result<Vec<KRat>>>()?;
    if cs.is_empty() {
        return Err(Error::ZeroOperator);
    }
    Ok(Operator::from_ratfuncs(kind, &cs))
}

pub fn operator_to_json(l: &Operator) -> OperatorJson {
    OperatorJson {
        kind: l.kind().name().into(),
        q: l.kind().q(),
        coeffs: l.ratfuncs().iter().map(format_ratfunc).collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AutomatonJson {
    pub q: u64,
    #[serde(default)]
    pub states: Vec<String>,
    pub transitions: Vec<Vec<usize>>,
    pub output: Vec<String>,
    pub initial: usize,
    pub digit_order: String,
}

pub fn automaton_from_json(j: &AutomatonJson, field: Option<&Arc<NumberField>>) -> Result<AutomatonSeq> {
    let lsd = match j.digit_order.as_str() {
        "lsd" => true,
        "msd" => false,
        o => return Err(Error::InvalidInput(format!("digit_order must be lsd or msd, got `{o}`"))),
    };
    if !j.states.is_empty() && j.states.len() != j.transitions.len() {
        return Err(Error::InvalidInput("one state name per transition row is required".into()));
    }
    let out = j.output.iter().map(|o| parse_element(o, field)).collect::<Result<Vec<_>>>()?;
    AutomatonSeq::new(j.q, j.transitions.clone(), out, j.initial, lsd)
}

pub fn automaton_to_json(a: &AutomatonSeq) -> AutomatonJson {
    AutomatonJson {
        q: a.q(),
        states: (0..a.states()).map(|i| format!("s{i}")).collect(),
        transitions: a.transitions().to_vec(),
        output: a.output().iter().map(|x| x.to_string()).collect(),
        initial: a.initial(),
        digit_order: if a.lsd() { "lsd" } else { "msd" }.into(),
    }
}

/// `sum_i a_i f(z^(q^i)) + b = 0` with initial coefficients.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EquationJson {
    pub q: u64,
    pub coeffs: Vec<String>,
    #[serde(default = "zero_text")]
    pub inhom: String,
    #[serde(default)]
    pub initial: Vec<String>,
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FunctionJson {
    #[serde(default = "default_version")]
    pub version: u32,
    pub name: String,
    /// `mahler` or `efunction`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<NumberFieldJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<EquationJson>,
    /// Rational function given in the grammar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annihilator: Option<OperatorJson>,
    /// Polynomial in shifts of other named functions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<RelationJson>,
    /// Built-in E-function entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efunction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Clone, Debug)]
pub enum LoadedFunction {
    Mahler(MahlerFunction),
    E(EFunction),
}

impl LoadedFunction {
    pub fn name(&self) -> &str {
        match self {
            LoadedFunction::Mahler(f) => f.name(),
            LoadedFunction::E(e) => &e.name,
        }
    }

    pub fn series(&self) -> &PowerSeries {
        match self {
            LoadedFunction::Mahler(f) => f.series(),
            LoadedFunction::E(e) => &e.series,
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            LoadedFunction::Mahler(f) => Kind::Sigma(f.q()),
            LoadedFunction::E(_) => Kind::Delta,
        }
    }

    pub fn annihilator(&self) -> Option<&Operator> {
        match self {
            LoadedFunction::Mahler(f) => f.annihilator(),
            LoadedFunction::E(e) => Some(&e.annihilator),
        }
    }

    /// First order at which the attached annihilator fails modulo `z^n`.
    pub fn check_annihilator(&self, n: usize) -> Option<usize> {
        let l = self.annihilator()?;
        l.apply_numerator(self.series(), n).iter().position(|c| !num_traits::Zero::is_zero(c))
    }
}

/// Builds a function that does not refer to other functions.
pub fn function_from_json(j: &FunctionJson) -> Result<LoadedFunction> {
    function_from_json_with(j, &|name| Err(Error::UnknownCorpusEntry(name.to_string())))
}

/// Series of `P(z, Theta^j f_i)`.
pub fn relation_series(r: &RelationPoly, funcs: &[PowerSeries]) -> PowerSeries {
    let mut acc = PowerSeries::from_vec(vec![]);
    for (m, c) in r.poly().terms() {
        let mut prod = PowerSeries::polynomial(c);
        for &(v, e) in m.pairs() {
            let s = r.kind().apply_power(&funcs[v.func], v.depth);
            for _ in 0..e {
                prod = prod.mul(&s);
            }
        }
        acc = acc.add(&prod);
    }
    acc
}

/// Builds the function, resolving names used by a `polynomial` definition.
/// Attached equations and annihilators are checked on load.
pub fn function_from_json_with(j: &FunctionJson, resolve: &dyn Fn(&str) -> Result<LoadedFunction>) -> Result<LoadedFunction> {
    let field = j.field.as_ref().map(field_from_json).transpose()?;
    let field = field.as_ref();
    match j.kind.as_str() {
        "efunction" => {
            let name = j.efunction.as_deref().unwrap_or(&j.name);
            let mut e = efunction(name)?;
            e.name = j.name.clone();
            if let Some(a) = &j.annihilator {
                let l = operator_from_json(a, field)?;
                if l.apply_numerator(&e.series, 64).iter().any(|c| !num_traits::Zero::is_zero(c)) {
                    return Err(Error::PreconditionViolated("annihilator does not kill the series".into()));
                }
                e.annihilator = l;
            }
            Ok(LoadedFunction::E(e))
        }
        "mahler" => {
            let mut f = if let Some(a) = &j.automaton {
                MahlerFunction::from_automaton(j.name.clone(), automaton_from_json(a, field)?)
            } else if let Some(eq) = &j.equation {
                let (e, init) = equation_from_json(eq, field)?;
                MahlerFunction::from_equation(j.name.clone(), e, init)?
            } else if let Some(p) = &j.polynomial {
                let r = relation_from_json(p)?;
                let Kind::Sigma(q) = r.kind() else {
                    return Err(Error::KindMismatch);
                };
                let funcs = r.labels().iter().map(|l| resolve(l).map(|f| f.series().clone())).collect::<Result<Vec<_>>>()?;
                MahlerFunction::from_series(j.name.clone(), q, relation_series(&r, &funcs))
            } else if let Some(r) = &j.rational {
                let q = j
                    .q
                    .or(j.annihilator.as_ref().and_then(|a| a.q))
                    .ok_or_else(|| Error::InvalidInput("rational Mahler function needs a base q".into()))?;
                MahlerFunction::from_series(j.name.clone(), q, PowerSeries::rational(parse_expression(r, field)?)?)
            } else {
                return Err(Error::InvalidInput("function needs an automaton, an equation or a rational form".into()));
            };
            if let Some(eq) = &j.equation {
                if f.equation().is_none() {
                    f = f.with_equation(equation_from_json(eq, field)?.0)?;
                }
            }
            if let Some(a) = &j.annihilator {
                f = f.with_annihilator(operator_from_json(a, field)?)?;
            }
            for n in &j.notes {
                f = f.with_note(n.clone());
            }
            Ok(LoadedFunction::Mahler(f))
        }
        other => Err(Error::InvalidInput(format!("unknown function kind `{other}`"))),
    }
}

pub fn equation_from_json(j: &EquationJson, field: Option<&Arc<NumberField>>) -> Result<(SigmaEquation, Vec<NfElem>)> {
    let cs = j.coeffs.iter().map(|c| parse_poly(c, field)).collect::<Result<Vec<KPoly>>>()?;
    let b = parse_poly(&j.inhom, field)?;
    let init = j.initial.iter().map(|c| parse_element(c, field)).collect::<Result<Vec<_>>>()?;
    Ok((SigmaEquation::new(j.q, cs, b)?, init))
}

pub fn equation_to_json(e: &SigmaEquation, initial: &[NfElem]) -> EquationJson {
    EquationJson {
        q: e.q(),
        coeffs: e.coeffs().iter().map(format_poly).collect(),
        inhom: format_poly(e.inhom()),
        initial: initial.iter().map(|x| x.to_string()).collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub coeff: String,
    /// `"label.depth" -> exponent`.
    pub monomial: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RelationJson {
    #[serde(default = "default_version")]
    pub version: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Function names in variable order. An empty monomial, or the key `1`,
    /// is the constant term.
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<NumberFieldJson>,
    pub terms: Vec<TermJson>,
}

fn parse_var(key: &str, labels: &mut Vec<String>, fixed: bool) -> Result<Var> {
    let (label, depth) = key
        .rsplit_once('.')
        .ok_or_else(|| Error::InvalidInput(format!("monomial key `{key}` is not of the form label.depth")))?;
    let depth: usize = depth.parse().map_err(|_| Error::InvalidInput(format!("bad depth in `{key}`")))?;
    let func = match labels.iter().position(|l| l == label) {
        Some(i) => i,
        None if !fixed => {
            labels.push(label.to_string());
            labels.len() - 1
        }
        None => return Err(Error::InvalidInput(format!("unknown function `{label}`"))),
    };
    Ok(Var::new(func, depth))
}

pub fn relation_from_json(j: &RelationJson) -> Result<RelationPoly> {
    let kind = kind_from(&j.kind, j.q)?;
    let field = j.field.as_ref().map(field_from_json).transpose()?;
    let mut labels = j.functions.clone();
    let fixed = !labels.is_empty();
    let mut poly = MultiPoly::zero();
    for t in &j.terms {
        let c = parse_poly(&t.coeff, field.as_ref())?;
        let mut pairs = Vec::new();
        for (k, &e) in &t.monomial {
            if k == "1" {
                continue;
            }
            pairs.push((parse_var(k, &mut labels, fixed)?, e));
        }
        poly.add_term(Monomial::from_pairs(pairs), c);
    }
    RelationPoly::new(kind, labels, poly)
}

pub fn relation_to_json(r: &RelationPoly) -> RelationJson {
    let field = r.poly().terms().flat_map(|(_, c)| c.coeffs().iter().filter_map(|x| x.field().cloned()).collect::<Vec<_>>()).next();
    RelationJson {
        version: FORMAT_VERSION,
        kind: r.kind().name().into(),
        q: r.kind().q(),
        functions: r.labels().to_vec(),
        field: field.map(|k| field_to_json(&k)),
        terms: r
            .poly()
            .terms()
            .map(|(m, c)| TermJson {
                coeff: format_poly(c),
                monomial: m.pairs().iter().map(|(v, e)| (format!("{}.{}", r.labels()[v.func], v.depth), *e)).collect(),
            })
            .collect(),
    }
}
