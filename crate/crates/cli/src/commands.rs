//! Subcommand implementations. Each returns a report with a JSON payload
//! and a human summary.

use serde_json::{json, Map, Value};

use relforge_core::efunc::guess_delta_operator;
use relforge_core::evalnum::{
    check_algebraic_value, check_entire_value, eval_ball, eval_entire, EvalReport, ValueCheck,
};
use relforge_core::field::{format_rational, parse_rational, ComplexBall, Field, FieldAutomorphism, NfElem, Q};
use relforge_core::formats::{operator_to_json, parse_element, relation_to_json, LoadedFunction, FORMAT_VERSION};
use relforge_core::mahler::guess::{guess_linear_sigma_relation, minimal_operator, DegreeBounds};
use relforge_core::mahler::regular::{is_regular_point, iterate_system, RegularityTarget};
use relforge_core::mahler::{mahler_denominator, make_level_r, remove_singularities, MahlerFunction};
use relforge_core::ore::{KRat, Kind, Operator, PowerSeries, SystemMatrix};
use relforge_core::poly::{KPoly, Monomial, MonomialOrder, MultiPoly, Var};
use relforge_core::relations::degenerate::{detect_degeneration, scan_degeneration_points, Degeneration};
use relforge_core::relations::groebner::{buchberger, clear_denominators, elimination_bad_set, GPoly};
use relforge_core::relations::{
    conjugate_object, decompose_function, descend_relation, guess_algebraic_relations, var_name, verify_relation,
    Conjugable, RelationPoly,
};
use relforge_core::{Error, Result};

use crate::workspace::{Point, Workspace, SECTIONS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The command ran and the checked property does not hold.
    Fail,
}

pub struct Report {
    pub status: Status,
    pub data: Map<String, Value>,
    pub lines: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report { status: Status::Ok, data: Map::new(), lines: Vec::new() }
    }

    fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.to_string(), v.into());
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn fail(mut self) -> Self {
        self.status = Status::Fail;
        self
    }
}

/// JSON document for a finished command.
pub fn render_json(command: &str, outcome: &Result<Report>) -> Value {
    let mut obj = Map::new();
    obj.insert("version".into(), json!(FORMAT_VERSION));
    obj.insert("command".into(), json!(command));
    match outcome {
        Ok(r) => {
            obj.insert("status".into(), json!(if r.status == Status::Ok { "ok" } else { "fail" }));
            obj.extend(r.data.clone());
        }
        Err(e) => {
            obj.insert("status".into(), json!("error"));
            obj.insert("error".into(), json!(e.name()));
            obj.insert("message".into(), json!(e.to_string()));
        }
    }
    Value::Object(obj)
}

/// `10^-digits`.
pub fn width_from_digits(digits: u32) -> Q {
    parse_rational(&format!("1/1{}", "0".repeat(digits as usize))).expect("decimal power")
}

pub fn parse_q(text: &str) -> Result<Q> {
    if let Some(q) = parse_rational(text) {
        return Ok(q);
    }
    parse_element(text, None)?.to_rational().ok_or_else(|| Error::InvalidInput(format!("`{text}` is not rational")))
}

fn ball_json(b: &ComplexBall) -> Value {
    let (re, im) = b.mid_f64();
    json!({ "ball": b.to_string(), "mid": [re, im], "width": format_rational(&b.width()) })
}

/// Decimal midpoint with the half-width, for summaries.
fn ball_text(b: &ComplexBall) -> String {
    let (re, im) = b.mid_f64();
    let rad = relforge_core::field::to_f64(&b.width()) / 2.0;
    if im == 0.0 {
        format!("{re:.20} +/- {rad:.1e}")
    } else {
        format!("{re:.20} {im:+.20}i +/- {rad:.1e}")
    }
}

/// `num/den` with the denominator normalized to `den(0) = 1` when possible.
fn rat_text(r: &KRat) -> String {
    let (num, den) = (r.num().clone(), r.den().clone());
    let c = den.coeff(0);
    let (num, den) = match c.inv() {
        Some(ci) => (num.scale(&ci), den.scale(&ci)),
        None => (num, den),
    };
    if den.is_constant() {
        return KRat::from_poly(num.scale(&den.coeff(0).inv().expect("nonzero"))).to_string();
    }
    format!("({num})/({den})")
}

fn mahler(f: &LoadedFunction) -> Result<&MahlerFunction> {
    match f {
        LoadedFunction::Mahler(m) => Ok(m),
        LoadedFunction::E(e) => {
            Err(Error::PreconditionViolated(format!("`{}` is an E-function; a Mahler function is required", e.name)))
        }
    }
}

fn bounds(ws: &Workspace, order: Option<usize>, degree: Option<usize>, terms: Option<usize>) -> DegreeBounds {
    let b = DegreeBounds::new(order.unwrap_or(ws.profile.max_order), degree.unwrap_or(ws.profile.max_degree));
    match terms {
        Some(n) => b.with_truncation(n),
        None => b,
    }
}

fn labels_of(r: &RelationPoly) -> impl Fn(Var) -> String + '_ {
    move |v| var_name(r.kind(), r.labels(), v)
}

pub fn series(ws: &Workspace, name: &str, terms: usize) -> Result<Report> {
    let f = ws.function(name)?;
    let cs = f.series().coeffs(terms);
    let mut r = Report::new();
    let text: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
    r.set("function", name);
    r.set("kind", f.kind().name());
    r.set("coefficients", text.clone());
    r.line(format!("{name}: {}", text.join(", ")));
    Ok(r)
}

pub fn guess(
    ws: &Workspace,
    names: &[String],
    order: Option<usize>,
    degree: Option<usize>,
    terms: Option<usize>,
    inhomogeneous: bool,
) -> Result<Report> {
    let funcs = names.iter().map(|n| ws.function(n)).collect::<Result<Vec<_>>>()?;
    let mut r = Report::new();
    if funcs.iter().all(|f| matches!(f, LoadedFunction::E(_))) {
        if funcs.len() != 1 {
            return Err(Error::InvalidInput("differential guessing takes a single function".into()));
        }
        let m = order.unwrap_or(ws.profile.max_order);
        let d = degree.unwrap_or(ws.profile.max_degree);
        let n = terms.unwrap_or(ws.profile.truncation.min(128));
        let l = guess_delta_operator(funcs[0].series(), m, d, n)
            .ok_or_else(|| Error::NoRelationWithinBounds(format!("order <= {m}, degree <= {d}")))?;
        r.set("operator", serde_json::to_value(operator_to_json(&l)).expect("serializable"));
        r.line(format!("{} annihilated by {}", names[0], l.display()));
        return Ok(r);
    }
    let ms = funcs.iter().map(|f| mahler(f).cloned()).collect::<Result<Vec<_>>>()?;
    let b = bounds(ws, order, degree, terms);
    let rels = guess_linear_sigma_relation(&ms, &b, inhomogeneous)?;
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let shown: Vec<String> = rels.iter().map(|x| format!("{} = 0", x.display(&refs))).collect();
    if shown.is_empty() {
        r.line("no relation within bounds");
    }
    for s in &shown {
        r.line(s.clone());
    }
    r.set("relations", shown);
    Ok(r)
}

pub fn minimize(ws: &Workspace, name: &str, order: Option<usize>, degree: Option<usize>, terms: Option<usize>) -> Result<Report> {
    let f = ws.function(name)?;
    let f = mahler(&f)?;
    let b = bounds(ws, order, degree, terms);
    let (l, cert) = minimal_operator(f, b.max_order, b.max_degree, b.truncation)?;
    let mut r = Report::new();
    r.set("operator", serde_json::to_value(operator_to_json(&l)).expect("serializable"));
    r.set(
        "certificate",
        json!({
            "order": cert.order,
            "degree": cert.degree,
            "degree_bound": cert.degree_bound,
            "truncation": cert.truncation,
            "excluded_orders": cert.excluded_orders,
            "reference_divides": cert.reference_divides,
            "note": cert.note,
        }),
    );
    r.line(format!("{name}: {}", l.display()));
    r.line(format!("order {} degree {}; orders {:?} excluded at degree {}", cert.order, cert.degree, cert.excluded_orders, cert.degree_bound));
    Ok(r)
}

pub fn denominator(ws: &Workspace, name: &str, order: Option<usize>, degree: Option<usize>, terms: Option<usize>) -> Result<Report> {
    let f = ws.function(name)?;
    let f = mahler(&f)?;
    let d = mahler_denominator(f, &bounds(ws, order, degree, terms))?;
    let mut r = Report::new();
    r.set("denominator", d.den.to_string());
    r.set("witness", d.witness.iter().map(|w| w.to_string()).collect::<Vec<_>>());
    r.set("caveat", d.caveat.clone());
    r.line(format!("denominator of {name}: {}", d.den));
    r.line(d.caveat);
    Ok(r)
}

pub fn level(ws: &Workspace, name: &str, radius: &Q, order: Option<usize>, degree: Option<usize>, terms: Option<usize>) -> Result<Report> {
    let f = ws.function(name)?;
    let f = mahler(&f)?;
    let l = make_level_r(f, radius, &bounds(ws, order, degree, terms))?;
    let mut r = Report::new();
    r.set("radius", format_rational(radius));
    r.set("operator", serde_json::to_value(operator_to_json(&l)).expect("serializable"));
    r.line(format!("level-{} operator for {name}: {}", format_rational(radius), l.display()));
    Ok(r)
}

fn operator_or_annihilator(ws: &Workspace, operator: Option<&str>, function: Option<&str>) -> Result<Operator> {
    match (operator, function) {
        (Some(o), _) => ws.operator(o),
        (None, Some(f)) => {
            let f = ws.function(f)?;
            if let LoadedFunction::Mahler(m) = &f {
                if let Some(eq) = m.equation() {
                    return Ok(eq.homogenize());
                }
            }
            f.annihilator().cloned().ok_or_else(|| Error::PreconditionViolated("function has no annihilator".into()))
        }
        (None, None) => Err(Error::InvalidInput("either --operator or --function is required".into())),
    }
}

pub fn regularize(ws: &Workspace, operator: Option<&str>, function: Option<&str>, radius: &Q) -> Result<Report> {
    let l = operator_or_annihilator(ws, operator, function)?;
    let (out, s) = remove_singularities(&l, radius)?;
    let mut r = Report::new();
    r.set("shift", s);
    r.set("operator", serde_json::to_value(operator_to_json(&out)).expect("serializable"));
    r.line(format!("s = {s}: {}", out.display()));
    Ok(r)
}

fn system_for(ws: &Workspace, operator: Option<&str>, function: Option<&str>) -> Result<SystemMatrix> {
    if operator.is_none() {
        if let Some(name) = function {
            if let LoadedFunction::Mahler(m) = ws.function(name)? {
                if let Some(eq) = m.equation() {
                    return eq.system(name);
                }
            }
        }
    }
    operator_or_annihilator(ws, operator, function)?.companion()
}

pub fn regular_point(ws: &Workspace, operator: Option<&str>, function: Option<&str>, point: &Point) -> Result<Report> {
    let mut r = Report::new();
    let rep = if operator.is_some() {
        let l = ws.operator(operator.unwrap_or_default())?;
        is_regular_point(RegularityTarget::Operator(&l), &point.value)?
    } else {
        let a = system_for(ws, None, function)?;
        is_regular_point(RegularityTarget::System(&a), &point.value)?
    };
    r.set("point", point.name.clone());
    r.set("regular", rep.regular);
    r.set("first_failure", rep.first_failure);
    r.set("ell_star", rep.ell_star);
    match rep.first_failure {
        Some(l) => r.line(format!("{} is singular: orbit point at level {l}", point.name)),
        None => r.line(format!("{} is regular (orbit checked exactly to level {})", point.name, rep.ell_star)),
    }
    Ok(r)
}

pub fn iterate(ws: &Workspace, operator: Option<&str>, function: Option<&str>, times: usize) -> Result<Report> {
    let a = system_for(ws, operator, function)?;
    let b = iterate_system(&a, times)?;
    let mut r = Report::new();
    let rows: Vec<Vec<String>> = b.entries().iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect();
    r.set("labels", b.labels().to_vec());
    r.set("matrix", rows.clone());
    r.set("det", b.det().to_string());
    r.line(format!("A_{times} for {} (det {})", b.labels().join(", "), b.det()));
    for row in rows {
        r.line(format!("  [{}]", row.join(", ")));
    }
    Ok(r)
}

pub fn relations(
    ws: &Workspace,
    names: &[String],
    kind: Option<Kind>,
    depth: usize,
    total: u32,
    degree: usize,
    terms: usize,
) -> Result<Report> {
    let funcs = names.iter().map(|n| ws.function(n)).collect::<Result<Vec<_>>>()?;
    let kind = match kind {
        Some(k) => k,
        None => funcs.first().map(|f| f.kind()).ok_or_else(|| Error::InvalidInput("no functions given".into()))?,
    };
    if funcs.iter().any(|f| f.kind() != kind) {
        return Err(Error::KindMismatch);
    }
    let series: Vec<PowerSeries> = funcs.iter().map(|f| f.series().clone()).collect();
    let rels = guess_algebraic_relations(kind, names, &series, depth, total, degree, terms)?;
    let mut r = Report::new();
    let shown: Vec<String> = rels.iter().map(|x| format!("{} = 0", x.display())).collect();
    r.set("relations", rels.iter().map(|x| serde_json::to_value(relation_to_json(x)).expect("serializable")).collect::<Vec<_>>());
    r.set("display", shown.clone());
    if shown.is_empty() {
        r.line("no relation within bounds");
    }
    for s in shown {
        r.line(s);
    }
    Ok(r)
}

/// Enclosure of `f(alpha)` when the evaluator applies.
fn value_ball(f: &LoadedFunction, alpha: &NfElem, width: &Q) -> Result<EvalReport> {
    match f {
        LoadedFunction::Mahler(m) => eval_ball(m, alpha, width),
        LoadedFunction::E(e) => eval_entire(&e.series, &e.bound, alpha, width),
    }
}

/// `R(z)` with `X_i(alpha) = R(alpha)` when the specialization is affine in
/// a single unshifted variable.
fn solved_form(q: &RelationPoly, p: &MultiPoly<NfElem>) -> Option<(usize, KRat)> {
    let vars = p.vars();
    if vars.len() != 1 || p.total_degree() != 1 {
        return None;
    }
    let v = *vars.iter().next()?;
    let mut konst = KPoly::zero();
    let mut lin = KPoly::zero();
    for (m, c) in q.poly().terms() {
        if m.is_one() {
            konst = &konst + c;
        } else if m == &Monomial::var(v) {
            lin = &lin + c;
        }
    }
    let r = KRat::new(-konst, lin).ok()?;
    Some((v.func, r))
}

pub fn degenerate(ws: &Workspace, relation: &str, point: &Point, digits: u32, banality: Option<(usize, usize)>) -> Result<Report> {
    let q = ws.relation(relation)?;
    let funcs = q.labels().iter().map(|n| ws.function(n)).collect::<Result<Vec<_>>>()?;
    let series: Vec<PowerSeries> = funcs.iter().map(|f| f.series().clone()).collect();
    let width = width_from_digits(digits);
    let balls: Option<Vec<ComplexBall>> =
        funcs.iter().map(|f| value_ball(f, &point.value, &width).ok().map(|e| e.ball)).collect();
    let d = detect_degeneration(&q, &series, &point.value, balls.as_deref(), banality)?;
    let mut r = Report::new();
    r.set("relation", relation);
    r.set("point", point.name.clone());
    match d {
        Degeneration::NotDegenerate { reason } => {
            r.set("degenerate", false);
            r.set("reason", reason.clone());
            r.line(format!("{relation} does not degenerate at {}: {reason}", point.name));
        }
        Degeneration::Degenerate(rep) => {
            r.set("degenerate", true);
            r.set("p", rep.display_p());
            r.set("witnesses", rep.witnesses.iter().map(|(m, c)| json!({ "monomial": m.format_with(&labels_of(&q)), "coeff": c.to_string() })).collect::<Vec<_>>());
            r.set("banal_within_bounds", rep.banal_within_bounds);
            r.set("numeric_consistent", rep.numeric_consistent);
            r.line(format!("{relation} degenerates at {} = {}", point.name, point.value));
            r.line(format!("P = {}", rep.display_p()));
            if let Some((i, form)) = solved_form(&q, &rep.p) {
                let name = &q.labels()[i];
                let val = form.eval(&point.value);
                r.set("solved", json!({ "function": name, "form": form.to_string(), "value": val.as_ref().map(|v| v.to_string()) }));
                r.line(format!("{name}({}) = R({}) with R = {}", point.name, point.name, rat_text(&form)));
                if let Some(v) = val {
                    r.line(format!("{name}({}) = {v}", point.name));
                }
            }
            if let Some(c) = rep.numeric_consistent {
                r.line(format!("numeric check at width 10^-{digits}: {}", if c { "consistent" } else { "inconsistent" }));
            }
        }
    }
    Ok(r)
}

pub fn scan(ws: &Workspace, relation: &str, radius: &Q) -> Result<Report> {
    let q = ws.relation(relation)?;
    let hits = scan_degeneration_points(&q, radius)?;
    let mut r = Report::new();
    r.set("radius", format_rational(radius));
    r.set(
        "factors",
        hits.iter()
            .map(|h| json!({ "factor": h.factor.to_string(), "roots": h.roots.iter().map(ball_json).collect::<Vec<_>>() }))
            .collect::<Vec<_>>(),
    );
    if hits.is_empty() {
        r.line(format!("no degeneration point in 0 < |z| < {}", format_rational(radius)));
    }
    for h in &hits {
        let roots: Vec<String> = h.roots.iter().map(|b| {
            let (re, im) = b.mid_f64();
            format!("{re:.12}{:+.12}i", im)
        }).collect();
        r.line(format!("factor {}: {} root(s) in disk [{}]", h.factor, h.roots.len(), roots.join(", ")));
    }
    Ok(r)
}

fn gpoly(r: &RelationPoly) -> GPoly {
    r.poly().map_coeffs(|c| KRat::from_poly(c.clone()))
}

fn load_ideal(ws: &Workspace, names: &[String]) -> Result<Vec<RelationPoly>> {
    let rels = names.iter().map(|n| ws.relation(n)).collect::<Result<Vec<_>>>()?;
    let first = rels.first().ok_or_else(|| Error::InvalidInput("no relations given".into()))?;
    if rels.iter().any(|r| r.labels() != first.labels() || r.kind() != first.kind()) {
        return Err(Error::InvalidInput("relations must share kind and functions".into()));
    }
    Ok(rels)
}

fn all_vars(rels: &[RelationPoly]) -> Vec<Var> {
    let mut vs: Vec<Var> = rels.iter().flat_map(|r| r.poly().vars()).collect();
    vs.sort();
    vs.dedup();
    vs
}

pub fn groebner(ws: &Workspace, names: &[String], grevlex: bool) -> Result<Report> {
    let rels = load_ideal(ws, names)?;
    let vars = all_vars(&rels);
    let order = if grevlex { MonomialOrder::DegRevLex(vars) } else { MonomialOrder::Lex(vars) };
    let gens: Vec<GPoly> = rels.iter().map(gpoly).collect();
    let basis = buchberger(&gens, &order)?;
    let name = labels_of(&rels[0]);
    let shown: Vec<String> = basis.iter().map(|g| clear_denominators(g, &order).format_with(&name)).collect();
    let mut r = Report::new();
    r.set("basis", shown.clone());
    r.line(format!("reduced basis ({} elements, denominators cleared):", shown.len()));
    for s in shown {
        r.line(format!("  {s}"));
    }
    Ok(r)
}

fn parse_var_key(q: &RelationPoly, key: &str) -> Result<Var> {
    let (label, depth) = key.rsplit_once('.').unwrap_or((key, "0"));
    let func = q.labels().iter().position(|l| l == label).ok_or_else(|| Error::InvalidInput(format!("unknown function `{label}`")))?;
    let depth = depth.parse().map_err(|_| Error::InvalidInput(format!("bad depth in `{key}`")))?;
    Ok(Var::new(func, depth))
}

pub fn badset(ws: &Workspace, names: &[String], keep: &[String]) -> Result<Report> {
    let rels = load_ideal(ws, names)?;
    let keep = keep.iter().map(|k| parse_var_key(&rels[0], k)).collect::<Result<Vec<_>>>()?;
    let gens: Vec<GPoly> = rels.iter().map(gpoly).collect();
    let res = elimination_bad_set(&gens, &keep)?;
    let name = labels_of(&rels[0]);
    let mut r = Report::new();
    r.set("bad", res.bad.to_string());
    r.set("basis", res.cleared.iter().map(|g| g.format_with(&name)).collect::<Vec<_>>());
    r.set("eliminant", res.eliminant.iter().map(|g| g.format_with(&name)).collect::<Vec<_>>());
    r.line(format!("bad-set polynomial: {}", res.bad));
    for g in &res.eliminant {
        r.line(format!("  eliminant: {}", g.format_with(&name)));
    }
    Ok(r)
}

pub fn descend(ws: &Workspace, relation: &str, point: &Point, terms: usize) -> Result<Report> {
    let q = ws.relation(relation)?;
    let alpha = point.value.to_rational().ok_or_else(|| Error::FieldTooSmall("descent needs a rational point".into()))?;
    let funcs = ws.series_of(q.labels())?;
    let mut ws_: Vec<KPoly> = Vec::new();
    let mut hs: Vec<PowerSeries> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let name = labels_of(&q);
    for (m, c) in q.poly().terms() {
        let h = if m.is_one() {
            PowerSeries::one()
        } else if m.degree() == 1 {
            let v = m.vars().next().expect("one variable");
            q.kind().apply_power(&funcs[v.func], v.depth)
        } else {
            return Err(Error::PreconditionViolated("descent applies to linear relations".into()));
        };
        ws_.push(c.clone());
        hs.push(h);
        names.push(if m.is_one() { "1".into() } else { m.format_with(&name) });
    }
    let a = NfElem::from_rational(&alpha);
    let zero_set: Vec<usize> = (0..ws_.len()).filter(|&i| ws_[i].vanishes_at(&a)).collect();
    let i0 = (0..ws_.len()).find(|i| !zero_set.contains(i)).ok_or(Error::NoComponentWitness)?;
    let out = descend_relation(&ws_, &hs, &alpha, &zero_set, i0, terms)?;
    let mut r = Report::new();
    let shown: Vec<String> = out.iter().zip(&names).map(|(w, n)| format!("({w})*{n}")).collect();
    r.set("coefficients", out.iter().map(|w| w.to_string()).collect::<Vec<_>>());
    r.set("terms", names);
    r.set("zero_set", zero_set);
    r.line(format!("{} = 0 over Q", shown.join(" + ")));
    Ok(r)
}

pub fn conjugate(ws: &Workspace, relation: &str, index: usize) -> Result<Report> {
    let j = ws.relation_json(relation)?;
    let q = relforge_core::formats::relation_from_json(&j)?;
    let field = j
        .field
        .as_ref()
        .map(relforge_core::formats::field_from_json)
        .transpose()?
        .ok_or_else(|| Error::PreconditionViolated("relation has rational coefficients".into()))?;
    let autos = FieldAutomorphism::all(&field)?;
    let tau = autos.get(index).ok_or_else(|| Error::InvalidInput(format!("field has {} automorphisms", autos.len())))?;
    let out = match conjugate_object(&Conjugable::Relation(q), tau)? {
        Conjugable::Relation(x) => x,
        _ => unreachable!("conjugation preserves the object type"),
    };
    let mut r = Report::new();
    r.set("automorphism", format!("t -> {}", tau.image_of_generator()));
    r.set("relation", serde_json::to_value(relation_to_json(&out)).expect("serializable"));
    r.line(format!("t -> {}: {} = 0", tau.image_of_generator(), out.display()));
    Ok(r)
}

pub fn decompose(ws: &Workspace, name: &str, values: &[(Point, String)], radius: &Q, digits: u32, terms: usize) -> Result<Report> {
    let f = ws.function(name)?;
    let f = mahler(&f)?;
    let vals = values
        .iter()
        .map(|(p, v)| parse_element(v, p.field.as_ref()).map(|x| (p.value.clone(), x)))
        .collect::<Result<Vec<_>>>()?;
    let d = decompose_function(f, &vals, radius, &width_from_digits(digits), terms)?;
    let mut r = Report::new();
    r.set("r1", d.r1.to_string());
    r.set("r2", d.r2.to_string());
    r.set("verified_to", d.verified_to);
    r.set("note", d.note.clone());
    r.set("steps", d.steps.iter().map(|s| json!({ "point": s.point.to_string(), "value": s.value.to_string(), "d": s.d.to_string(), "n_gamma": s.n_gamma.to_string() })).collect::<Vec<_>>());
    if let Some(eq) = d.g.equation() {
        r.set("g_equation", json!({ "coeffs": eq.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(), "inhom": eq.inhom().to_string() }));
    }
    r.line(format!("{name} = R1 + R2*g, checked modulo z^{}", d.verified_to));
    r.line(format!("R1 = {}", rat_text(&d.r1)));
    r.line(format!("R2 = {}", rat_text(&d.r2)));
    for s in &d.steps {
        r.line(format!("orbit of {}: D = {}, N = {}", s.point, s.d, s.n_gamma));
    }
    Ok(r)
}

pub fn eval(ws: &Workspace, name: &str, point: &Point, digits: u32) -> Result<Report> {
    let f = ws.function(name)?;
    let rep = value_ball(&f, &point.value, &width_from_digits(digits))?;
    let mut r = Report::new();
    r.set("function", name);
    r.set("point", point.name.clone());
    r.set("value", ball_json(&rep.ball));
    r.set("method", rep.method());
    r.set("bound", rep.bound.to_string());
    r.set("certified", rep.certified);
    r.line(format!("{name}({}) = {}", point.name, ball_text(&rep.ball)));
    r.line(format!("method {}, bound {}{}", rep.method(), rep.bound, if rep.certified { "" } else { " (not certified)" }));
    Ok(r)
}

pub fn check_value(ws: &Workspace, name: &str, point: &Point, value: &str, digits: u32) -> Result<Report> {
    let f = ws.function(name)?;
    let cand = parse_element(value, point.field.as_ref())?;
    let width = width_from_digits(digits);
    let check = match &f {
        LoadedFunction::Mahler(m) => check_algebraic_value(m, &point.value, &cand, &width)?,
        LoadedFunction::E(e) => check_entire_value(&e.series, &e.bound, &point.value, &cand, &width)?,
    };
    let mut r = Report::new();
    let (value_ball, cand_ball, ok) = match &check {
        ValueCheck::Consistent { value, candidate } => (value, candidate, true),
        ValueCheck::Refuted { value, candidate } => (value, candidate, false),
    };
    r.set("consistent", ok);
    r.set("value", ball_json(value_ball));
    r.set("candidate", ball_json(cand_ball));
    r.line(format!("{name}({}) = {}", point.name, ball_text(value_ball)));
    if ok {
        r.line(format!("candidate {cand} is consistent at width 10^-{digits}"));
        Ok(r)
    } else {
        r.line(format!("candidate {cand} is refuted"));
        Ok(r.fail())
    }
}

pub fn verify(ws: &Workspace, relation: &str, terms: usize) -> Result<Report> {
    let q = ws.relation(relation)?;
    let funcs = ws.series_of(q.labels())?;
    let res = verify_relation(&q, &funcs, terms)?;
    let mut r = Report::new();
    r.set("relation", relation);
    r.set("terms", terms);
    r.set("first_failure", res);
    match res {
        None => {
            r.line(format!("{relation}: pass modulo z^{terms}"));
            Ok(r)
        }
        Some(k) => {
            r.line(format!("{relation}: fails at order {k}"));
            Ok(r.fail())
        }
    }
}

pub fn corpus(ws: &Workspace, validate: bool) -> Result<Report> {
    let mut r = Report::new();
    r.set("directory", ws.dir.display().to_string());
    let mut failed = false;
    let mut sections = Map::new();
    for s in SECTIONS {
        let mut entries = Vec::new();
        for name in ws.names(s) {
            if validate {
                let start = std::time::Instant::now();
                let res = ws.validate(s, &name);
                let secs = start.elapsed().as_secs_f64();
                match res {
                    Ok(msg) => {
                        r.line(format!("{s}/{name}: ok ({msg}, {secs:.2}s)"));
                        entries.push(json!({ "name": name, "ok": true, "seconds": secs }));
                    }
                    Err(e) => {
                        failed = true;
                        r.line(format!("{s}/{name}: {} ({e})", e.name()));
                        entries.push(json!({ "name": name, "ok": false, "error": e.name(), "message": e.to_string() }));
                    }
                }
            } else {
                r.line(format!("{s}/{name}"));
                entries.push(json!({ "name": name }));
            }
        }
        sections.insert(s.to_string(), Value::Array(entries));
    }
    r.data.insert("sections".into(), Value::Object(sections));
    Ok(if failed { r.fail() } else { r })
}
