//! JSON group-spec documents, element literals and characteristic literals.
//!
//! ```json
//! {
//!   "name": "G",
//!   "registry": { "explicit": [5], "families": [{ "id": "P", "excluded": [3] }] },
//!   "rank": 2,
//!   "locals": [{ "class": "P", "basis": [["1", "0"], ["0", { "-1": "1" }]], "divisible": [] }],
//!   "elements": { "x": "(5,1)" }
//! }
//! ```
//!
//! A basis entry is a rational string or a map from exponents of the class
//! prime to rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::catalog::CatalogEntry;
use crate::chartype::{Characteristic, HeightValue};
use crate::error::{Error, Result};
use crate::group::{self, Element, FRGroup, LocalData};
use crate::linalg::LMat;
use crate::primesym::{ClassKey, Family, FamilyId, LaurentScalar, Registry};
use crate::qmath::{self, Q};

/// A group with named elements.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub group: FRGroup,
    pub elements: Vec<(String, Element)>,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| perr(format!("{what} must be a non-negative integer")))
}

fn rational_value(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => qmath::parse_rational(s),
        Value::Number(n) => n.as_i64().map(qmath::q).ok_or_else(|| perr(format!("bad number {n}"))),
        _ => Err(perr(format!("expected a rational, found {v}"))),
    }
}

fn parse_registry(v: &Value) -> Result<Registry> {
    let explicit: Vec<u64> = match v.get("explicit") {
        Some(Value::Array(a)) => a.iter().map(|p| as_u64(p, "explicit prime")).collect::<Result<_>>()?,
        None => vec![],
        _ => return Err(perr("`explicit` must be a list")),
    };
    let mut fams = Vec::new();
    if let Some(fs) = v.get("families") {
        for f in fs.as_array().ok_or_else(|| perr("`families` must be a list"))? {
            let (id, excluded) = match f {
                Value::String(s) => (s.clone(), BTreeSet::new()),
                Value::Object(o) => {
                    let id = o.get("id").and_then(Value::as_str).ok_or_else(|| perr("family without id"))?;
                    let ex = match o.get("excluded") {
                        Some(Value::Array(a)) => a.iter().map(|p| as_u64(p, "excluded prime")).collect::<Result<_>>()?,
                        None => BTreeSet::new(),
                        _ => return Err(perr("`excluded` must be a list")),
                    };
                    (id.to_string(), ex)
                }
                _ => return Err(perr("bad family declaration")),
            };
            let mut fam = Family::new(&id);
            fam.excluded = excluded;
            fams.push(fam);
        }
    }
    let used: Vec<u64> = match v.get("used") {
        Some(Value::Array(a)) => a.iter().map(|p| as_u64(p, "used prime")).collect::<Result<_>>()?,
        None => vec![],
        _ => return Err(perr("`used` must be a list")),
    };
    Registry::from_parts(&explicit, fams, &used)
}

fn registry_json(reg: &Registry) -> Value {
    let fams: Vec<Value> = reg
        .families()
        .map(|f| json!({ "id": f.id.as_ref(), "excluded": f.excluded }))
        .collect();
    let mut o = Map::new();
    o.insert("explicit".into(), json!(reg.explicit_primes()));
    o.insert("families".into(), Value::Array(fams));
    let extra: Vec<u64> = reg.used_primes().difference(&reg.explicit_primes()).copied().collect();
    if !extra.is_empty() {
        o.insert("used".into(), json!(extra));
    }
    Value::Object(o)
}

fn parse_entry(v: &Value, sym: Option<&FamilyId>) -> Result<LaurentScalar> {
    match v {
        Value::Object(o) => {
            let mut terms = BTreeMap::new();
            for (k, c) in o {
                let e: i64 = k.trim().parse().map_err(|_| perr(format!("bad exponent `{k}`")))?;
                terms.insert(e, rational_value(c)?);
            }
            if terms.keys().any(|&e| e != 0) && sym.is_none() {
                return Err(perr("powers of p are only allowed at families and the rest"));
            }
            if sym.is_none() {
                return Ok(LaurentScalar::constant(terms.remove(&0).unwrap_or_default()));
            }
            Ok(LaurentScalar::from_terms(sym.cloned(), terms))
        }
        _ => Ok(LaurentScalar::constant(rational_value(v)?)),
    }
}

fn entry_json(e: &LaurentScalar) -> Value {
    match e.as_rational() {
        Some(c) => Value::String(qmath::fmt_rational(&c)),
        None => {
            let o: Map<String, Value> = e
                .terms()
                .iter()
                .map(|(k, c)| (k.to_string(), Value::String(qmath::fmt_rational(c))))
                .collect();
            Value::Object(o)
        }
    }
}

fn parse_local(v: &Value, reg: &Registry, rank: usize) -> Result<(ClassKey, LocalData)> {
    let class = v.get("class").ok_or_else(|| perr("local without class"))?;
    let class = match class {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(perr("bad class")),
    };
    let key = reg.parse_key(&class)?;
    let sym = group::class_symbol(&key);
    let rows = match v.get("basis") {
        Some(Value::Array(rows)) => rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| perr("basis rows must be lists"))?
                    .iter()
                    .map(|e| parse_entry(e, sym.as_ref()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?,
        None => (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| if i == j { LaurentScalar::one() } else { LaurentScalar::zero() })
                    .collect()
            })
            .collect(),
        _ => return Err(perr("`basis` must be a list of rows")),
    };
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        return Err(Error::Dimension {
            expected: rank,
            found: rows.len(),
        });
    }
    let divisible: BTreeSet<usize> = match v.get("divisible") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|d| as_u64(d, "divisible column").map(|d| d as usize))
            .collect::<Result<_>>()?,
        None => BTreeSet::new(),
        _ => return Err(perr("`divisible` must be a list")),
    };
    let l = LocalData::new(LMat::from_rows(rows), divisible).map_err(|e| match e {
        Error::InvalidLocal { reason, .. } => Error::InvalidLocal {
            class: key.to_string(),
            reason,
        },
        e => e,
    })?;
    Ok((key, l))
}

fn local_json(key: &ClassKey, l: &LocalData) -> Value {
    let rows: Vec<Value> = l
        .basis()
        .to_rows()
        .iter()
        .map(|r| Value::Array(r.iter().map(entry_json).collect()))
        .collect();
    json!({ "class": key.to_string(), "basis": rows, "divisible": l.divisible() })
}

/// Parses a group-spec document.
pub fn parse_spec(text: &str) -> Result<GroupSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("invalid JSON: {e}")))?;
    parse_spec_value(&v)
}

pub fn parse_spec_value(v: &Value) -> Result<GroupSpec> {
    let name = v.get("name").and_then(Value::as_str).unwrap_or("G").to_string();
    let reg = Arc::new(parse_registry(v.get("registry").unwrap_or(&json!({})))?);
    let rank = as_u64(v.get("rank").ok_or_else(|| perr("missing rank"))?, "rank")? as usize;
    let mut locals = BTreeMap::new();
    if let Some(ls) = v.get("locals") {
        for l in ls.as_array().ok_or_else(|| perr("`locals` must be a list"))? {
            let (k, d) = parse_local(l, &reg, rank)?;
            if locals.insert(k.clone(), d).is_some() {
                return Err(perr(format!("class {k} given twice")));
            }
        }
    }
    let group = FRGroup::new(name, reg, rank, locals)?;
    let mut elements = Vec::new();
    if let Some(es) = v.get("elements") {
        let es = es.as_object().ok_or_else(|| perr("`elements` must be an object"))?;
        for (n, lit) in es {
            let lit = lit.as_str().ok_or_else(|| perr("element literals must be strings"))?;
            let x = parse_element(lit, &group)?;
            elements.push((n.clone(), x));
        }
    }
    Ok(GroupSpec { group, elements })
}

pub fn spec_json(s: &GroupSpec) -> Value {
    let g = &s.group;
    let locals: Vec<Value> = g
        .locals()
        .iter()
        .filter(|(_, l)| !l.is_identity())
        .map(|(k, l)| local_json(k, l))
        .collect();
    let elements: Map<String, Value> = s.elements.iter().map(|(n, x)| (n.clone(), Value::String(x.to_string()))).collect();
    json!({
        "name": g.name(),
        "registry": registry_json(g.registry()),
        "rank": g.rank(),
        "locals": locals,
        "elements": elements,
    })
}

/// Canonical text of a spec: sorted keys, two-space indentation.
pub fn emit_spec(s: &GroupSpec) -> String {
    let mut out = serde_json::to_string_pretty(&spec_json(s)).expect("serializable");
    out.push('\n');
    out
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// One term `(c1,..,cn)` optionally followed by `/p`, `/p^k` or `*p^k`;
/// returns the exponent of `p` and the coordinates.
fn parse_term(t: &str) -> Result<(i64, Vec<Q>)> {
    let t = t.trim();
    let bad = || perr(format!("bad element term `{t}`"));
    if !t.starts_with('(') {
        return Err(bad());
    }
    let close = t.find(')').ok_or_else(bad)?;
    let inner = &t[1..close];
    let coords: Vec<Q> = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').map(qmath::parse_rational).collect::<Result<_>>()?
    };
    let rest = t[close + 1..].replace(' ', "");
    let exp = if rest.is_empty() {
        0
    } else if let Some(r) = rest.strip_prefix("/p") {
        match r.strip_prefix('^') {
            Some(k) => -k.parse::<i64>().map_err(|_| bad())?,
            None if r.is_empty() => -1,
            None => return Err(bad()),
        }
    } else if let Some(r) = rest.strip_prefix("*p") {
        match r.strip_prefix('^') {
            Some(k) => k.parse::<i64>().map_err(|_| bad())?,
            None if r.is_empty() => 1,
            None => return Err(bad()),
        }
    } else {
        return Err(bad());
    };
    Ok((exp, coords))
}

/// Parses `(5,1)`, `(1,1,0)/p@P2`, `(1,0)*p^-1 + (0,1)*p^0 @P` and the like.
pub fn parse_element_literal(s: &str) -> Result<Element> {
    let s = s.trim();
    let (body, fam) = match s.rsplit_once('@') {
        Some((b, f)) => (b, Some(FamilyId::from(f.trim()))),
        None => (s, None),
    };
    let mut terms: BTreeMap<i64, Vec<Q>> = BTreeMap::new();
    let mut n = None;
    for t in split_top(body, '+') {
        let (e, v) = parse_term(t)?;
        if *n.get_or_insert(v.len()) != v.len() {
            return Err(perr(format!("terms of `{s}` have different lengths")));
        }
        if e != 0 && fam.is_none() {
            return Err(perr(format!("`{s}` uses p without naming a family")));
        }
        let slot = terms.entry(e).or_insert_with(|| vec![Q::default(); v.len()]);
        for (a, b) in slot.iter_mut().zip(v) {
            *a += b;
        }
    }
    let n = n.unwrap_or(0);
    if n == 0 {
        return Err(perr("empty element"));
    }
    let coords = (0..n)
        .map(|j| {
            let t: BTreeMap<i64, Q> = terms.iter().map(|(e, v)| (*e, v[j].clone())).collect();
            LaurentScalar::from_terms(fam.clone(), t)
        })
        .collect();
    Element::new(coords)
}

/// Parses an element literal and checks it against the group.
pub fn parse_element(s: &str, g: &FRGroup) -> Result<Element> {
    let x = parse_element_literal(s)?;
    if x.rank() != g.rank() {
        return Err(Error::Dimension {
            expected: g.rank(),
            found: x.rank(),
        });
    }
    if let Some(f) = x.family() {
        if g.registry().family(f).is_none() {
            return Err(Error::UnknownClass(f.to_string()));
        }
    }
    Ok(x)
}

/// Element given as a literal string, a JSON string, a JSON list of
/// rationals, or an object with an `element` field.
pub fn parse_element_json(v: &Value, g: &FRGroup) -> Result<Element> {
    match v {
        Value::String(s) => parse_element(s, g),
        Value::Array(a) => {
            let c: Vec<Q> = a.iter().map(rational_value).collect::<Result<_>>()?;
            let x = Element::from_rationals(c);
            if x.rank() != g.rank() {
                return Err(Error::Dimension {
                    expected: g.rank(),
                    found: x.rank(),
                });
            }
            Ok(x)
        }
        Value::Object(o) => parse_element_json(o.get("element").ok_or_else(|| perr("missing `element`"))?, g),
        _ => Err(perr("bad element")),
    }
}

fn height_value(v: &Value) -> Result<HeightValue> {
    match v {
        Value::Number(n) => n.as_u64().map(HeightValue::Finite).ok_or_else(|| perr(format!("bad height {n}"))),
        Value::String(s) => HeightValue::parse(s),
        _ => Err(perr(format!("bad height {v}"))),
    }
}

fn height_json(h: HeightValue) -> Value {
    match h {
        HeightValue::Finite(k) => json!(k),
        HeightValue::Inf => json!("inf"),
    }
}

/// `{"rest": 0, "families": {"P2": 1}, "explicit": {"5": "inf"}, "primes": {"7": 3}}`;
/// `primes` lists single primes of the rest class.
pub fn parse_characteristic(v: &Value, reg: &Arc<Registry>) -> Result<Characteristic> {
    let mut chi = Characteristic::zero(reg);
    let o = v.as_object().ok_or_else(|| perr("characteristic must be an object"))?;
    for (k, val) in o {
        match k.as_str() {
            "rest" => chi.set_class(&ClassKey::Rest, height_value(val)?)?,
            "families" | "explicit" | "primes" => {
                let m = val.as_object().ok_or_else(|| perr(format!("`{k}` must be an object")))?;
                for (c, h) in m {
                    let h = height_value(h)?;
                    match k.as_str() {
                        "families" => {
                            if reg.family(c).is_none() {
                                return Err(Error::UnknownClass(c.clone()));
                            }
                            chi.set_class(&ClassKey::family(c), h)?
                        }
                        "explicit" => {
                            let p: u64 = c.parse().map_err(|_| perr(format!("bad prime `{c}`")))?;
                            if !reg.explicit_primes().contains(&p) {
                                return Err(Error::UnknownClass(c.clone()));
                            }
                            chi.set_class(&ClassKey::Explicit(p), h)?
                        }
                        _ => chi.set_prime(c.parse().map_err(|_| perr(format!("bad prime `{c}`")))?, h)?,
                    }
                }
            }
            _ => return Err(perr(format!("unknown characteristic field `{k}`"))),
        }
    }
    Ok(chi)
}

pub fn characteristic_json(chi: &Characteristic) -> Value {
    let mut fams = Map::new();
    let mut explicit = Map::new();
    let mut rest = json!(0);
    for (k, h) in chi.defaults() {
        match k {
            ClassKey::Explicit(p) => {
                explicit.insert(p.to_string(), height_json(*h));
            }
            ClassKey::Family(f) => {
                fams.insert(f.to_string(), height_json(*h));
            }
            ClassKey::Rest => rest = height_json(*h),
        }
    }
    let primes: Map<String, Value> = chi.overrides().iter().map(|(p, h)| (p.to_string(), height_json(*h))).collect();
    json!({ "rest": rest, "families": fams, "explicit": explicit, "primes": primes })
}

/// The spec document of a catalog entry: its named elements plus the
/// witness pairs as `w<i>_x`, `w<i>_y`.
pub fn from_entry(e: &CatalogEntry) -> GroupSpec {
    let mut elements = e.elements.clone();
    for (i, w) in e.witnesses.iter().enumerate() {
        elements.push((format!("w{}_x", i + 1), w.x.clone()));
        elements.push((format!("w{}_y", i + 1), w.y.clone()));
    }
    GroupSpec {
        group: e.group.clone(),
        elements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::qmath::{q, qf};

    #[test]
    fn literals() {
        let x = parse_element_literal("(5, 1)").unwrap();
        assert_eq!(x, Element::from_ints(&[5, 1]));
        let y = parse_element_literal("(1,1,0)/p@P2").unwrap();
        let p2: FamilyId = "P2".into();
        assert_eq!(y, Element::from_ints(&[1, 1, 0]).shift(&p2, -1));
        assert_eq!(parse_element_literal(&y.to_string()).unwrap(), y);
        let z = parse_element_literal("(1,0)*p^-2 + (0,1/2) @P").unwrap();
        assert_eq!(parse_element_literal(&z.to_string()).unwrap(), z);
        assert_eq!(
            parse_element_literal("(1/3,-2)").unwrap(),
            Element::from_rationals(vec![qf(1, 3), q(-2)])
        );
        assert!(parse_element_literal("(1,2)/p").is_err());
        assert!(parse_element_literal("(1,2) + (1)@P").is_err());
        assert!(parse_element_literal("1,2").is_err());
    }

    #[test]
    fn catalog_round_trip() {
        for e in catalog::all().unwrap() {
            let s = from_entry(&e);
            let text = emit_spec(&s);
            let back = parse_spec(&text).unwrap();
            assert_eq!(back.group, e.group, "{}", e.name);
            assert_eq!(emit_spec(&back), text);
        }
    }

    #[test]
    fn characteristic_literals() {
        let reg = Arc::new(Registry::new(&[5], &["P2"]).unwrap());
        let v: Value = serde_json::from_str(r#"{"rest":0,"families":{"P2":1},"explicit":{"5":"inf"},"primes":{"7":3}}"#).unwrap();
        let chi = parse_characteristic(&v, &reg).unwrap();
        assert_eq!(chi.at_prime(5), HeightValue::Inf);
        assert_eq!(chi.at_prime(7), HeightValue::Finite(3));
        assert_eq!(chi.at_class(&ClassKey::family("P2")), HeightValue::Finite(1));
        assert_eq!(parse_characteristic(&characteristic_json(&chi), &reg).unwrap(), chi);
        let bad: Value = serde_json::from_str(r#"{"families":{"Q":1}}"#).unwrap();
        assert!(parse_characteristic(&bad, &reg).is_err());
    }

    #[test]
    fn malformed_specs() {
        assert!(parse_spec("{").is_err());
        assert!(parse_spec(r#"{"rank": 0}"#).is_err());
        let not_containing = r#"{"registry":{"explicit":[5]},"rank":1,"locals":[{"class":"5","basis":[["5"]]}]}"#;
        assert!(matches!(parse_spec(not_containing), Err(Error::InvalidLocal { .. })));
        let unknown = r#"{"rank":1,"locals":[{"class":"Q","basis":[["1"]]}]}"#;
        assert!(parse_spec(unknown).is_err());
    }
}
