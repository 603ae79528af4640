//! File formats: group tables, subgroup descriptors, sequence files and
//! witnesses. Everything written goes through [`canonical`], which sorts
//! object keys, so repeated runs produce identical bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::families::{close_family, is_family, Family};
use crate::graph::{graph_of, GraphDatum, ProductTower};
use crate::group::{make_builtin, FiniteGroup, GroupJson, Homomorphism, Limits, Permutation, Subgroup};
use crate::realizability::{validate_n_infinity, Coverage, FamilySequence, Witness};

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical(value: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

/// Compact canonical form, used for hashing.
pub fn canonical_compact(value: &Value) -> String {
    serde_json::to_string(value).expect("values always serialize")
}

/// A builtin spec, or a path to a group JSON file when one exists.
pub fn load_group(arg: &str, base: Option<&Path>, limits: &Limits) -> Result<FiniteGroup> {
    let path = match base {
        Some(dir) if Path::new(arg).is_relative() => dir.join(arg),
        _ => PathBuf::from(arg),
    };
    if path.is_file() {
        let text = std::fs::read_to_string(&path)?;
        let parsed: GroupJson = serde_json::from_str(&text)?;
        return parsed.into_group(limits);
    }
    make_builtin(arg, limits)
}

fn usize_of(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Input(format!("{what}: expected a non-negative integer, got {v}")))
}

fn array_of<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Input(format!("{what}: expected an array, got {v}")))
}

fn usizes(v: &Value, what: &str) -> Result<Vec<usize>> {
    array_of(v, what)?.iter().map(|x| usize_of(x, what)).collect()
}

fn perm_of(v: &Value, n: usize) -> Result<Permutation> {
    let images = usizes(v, "permutation")?;
    if images.len() != n {
        return Err(Error::Input(format!("permutation {images:?} should have length {n}")));
    }
    Permutation::new(images)
}

/// A subgroup of `G` from `{"elements": [g, ...]}`.
pub fn parse_group_subgroup(group: &FiniteGroup, v: &Value) -> Result<Subgroup> {
    let elems = v
        .get("elements")
        .ok_or_else(|| Error::Input(format!("subgroup descriptor needs \"elements\": {v}")))?;
    Subgroup::new(group, usizes(elems, "subgroup elements")?)
}

pub fn group_subgroup_json(s: &Subgroup) -> Value {
    json!({ "elements": s.elements() })
}

/// A subgroup of `G x S_n` from either descriptor form.
pub fn parse_descriptor(tower: &ProductTower, n: usize, v: &Value) -> Result<Subgroup> {
    let product = tower.product(n)?;
    if let Some(elems) = v.get("elements") {
        let mut out = Vec::new();
        for pair in array_of(elems, "elements")? {
            let pair = array_of(pair, "element pair")?;
            if pair.len() != 2 {
                return Err(Error::Input("element pairs are [g, [perm]]".into()));
            }
            let g = usize_of(&pair[0], "group element")?;
            if g >= tower.group().order() {
                return Err(Error::Input(format!("element {g} out of range for {}", tower.group().label())));
            }
            out.push(product.pair(g, perm_of(&pair[1], n)?.lex_rank()));
        }
        return Subgroup::new(&product.group, out);
    }
    if let Some(graph) = v.get("graph") {
        let h_elems = graph.get("H").ok_or_else(|| Error::Input("graph descriptor needs \"H\"".into()))?;
        let h = Subgroup::new(tower.group(), usizes(h_elems, "H")?)?;
        let rho = graph
            .get("rho")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Input("graph descriptor needs a \"rho\" object".into()))?;
        let mut by_elem = BTreeMap::new();
        for (k, p) in rho {
            let g: usize = k.parse().map_err(|_| Error::Input(format!("rho key {k:?} is not an element index")))?;
            by_elem.insert(g, perm_of(p, n)?.lex_rank());
        }
        if by_elem.keys().copied().ne(h.elements().iter().copied()) {
            return Err(Error::Input("rho must assign a permutation to exactly the elements of H".into()));
        }
        let datum = GraphDatum::new(tower, h, by_elem.into_values().collect(), n)?;
        return graph_of(tower, &datum);
    }
    Err(Error::Input(format!("unrecognized subgroup descriptor: {v}")))
}

/// `{"elements": [[g, [perm]], ...]}`.
pub fn descriptor_json(tower: &ProductTower, n: usize, s: &Subgroup) -> Result<Value> {
    let product = tower.product(n)?;
    let elems: Vec<Value> = s
        .elements()
        .iter()
        .map(|&z| {
            let (g, r) = product.split(z);
            json!([g, tower.perm(n, r).images()])
        })
        .collect();
    Ok(json!({ "elements": elems }))
}

/// `ρ` as `{"<h>": [perm], ...}` keyed by elements of `G`.
pub fn rho_json(tower: &ProductTower, h: &Subgroup, rho: &Homomorphism, n: usize) -> Value {
    let map: Map<String, Value> = h
        .elements()
        .iter()
        .zip(rho.images())
        .map(|(g, &r)| (g.to_string(), json!(tower.perm(n, r).images())))
        .collect();
    Value::Object(map)
}

/// How a sequence file is validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Graph subgroups containing every `H x 1`.
    NInfinity,
    /// Any families; only closure is meaningful for non-graph members.
    General,
    /// Graph subgroups containing `H x 1` for `H` in the family.
    HFamily(Family),
}

impl Mode {
    pub fn coverage(&self) -> Option<Coverage> {
        match self {
            Mode::NInfinity => Some(Coverage::Full),
            Mode::General => None,
            Mode::HFamily(f) => Some(Coverage::Subgroups(f.clone())),
        }
    }

    pub fn scope(&self) -> Option<&Family> {
        match self {
            Mode::HFamily(f) => Some(f),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Mode::NInfinity => json!("n_infinity"),
            Mode::General => json!("general"),
            Mode::HFamily(f) => json!({ "h_family": f.iter().map(group_subgroup_json).collect::<Vec<_>>() }),
        }
    }
}

/// `"n_infinity"`, `"general"`, `{"h_family": [...]}` or a bare descriptor list.
pub fn parse_mode(group: &Arc<FiniteGroup>, v: &Value, limits: &Limits) -> Result<Mode> {
    match v {
        Value::String(s) if s == "n_infinity" => Ok(Mode::NInfinity),
        Value::String(s) if s == "general" => Ok(Mode::General),
        Value::Object(o) if o.contains_key("h_family") => parse_mode(group, &o["h_family"], limits),
        Value::Array(items) => {
            let subs = items.iter().map(|d| parse_group_subgroup(group, d)).collect::<Result<Vec<_>>>()?;
            Ok(Mode::HFamily(close_family(group, subs, limits)?))
        }
        _ => Err(Error::Input(format!("unknown mode {v}"))),
    }
}

/// A sequence file: the group reference as written, the mode, the sequence.
#[derive(Clone, Debug)]
pub struct SequenceDoc {
    pub group: String,
    pub mode: Mode,
    pub sequence: FamilySequence,
}

impl SequenceDoc {
    pub fn to_json(&self) -> Result<Value> {
        Ok(json!({
            "group": self.group,
            "max_arity": self.sequence.max_arity(),
            "mode": self.mode.to_json(),
            "families": families_json(&self.sequence)?,
        }))
    }
}

pub fn families_json(seq: &FamilySequence) -> Result<Value> {
    let tower = seq.tower();
    let levels = seq
        .families()
        .iter()
        .enumerate()
        .map(|(n, f)| f.iter().map(|s| descriptor_json(tower, n, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(json!(levels))
}

/// Reads the families of a sequence over an existing tower. With `strict`,
/// a level that is not already closed is an error; otherwise it is closed.
pub fn parse_families(tower: &Arc<ProductTower>, v: &Value, strict: bool) -> Result<FamilySequence> {
    let levels = array_of(v, "families")?;
    if levels.len() != tower.max_arity() + 1 {
        return Err(Error::InvalidSequence(format!(
            "max_arity {} needs {} levels, found {}",
            tower.max_arity(),
            tower.max_arity() + 1,
            levels.len()
        )));
    }
    let mut families = Vec::with_capacity(levels.len());
    for (n, level) in levels.iter().enumerate() {
        let members = array_of(level, "family")?
            .iter()
            .map(|d| parse_descriptor(tower, n, d))
            .collect::<Result<Vec<_>>>()?;
        let ambient = tower.ambient(n)?;
        if strict {
            if let Err(v) = is_family(ambient, members.iter(), tower.limits())? {
                return Err(Error::InvalidSequence(format!("level {n} is not closed: {v}")));
            }
        }
        families.push(close_family(ambient, members, tower.limits())?);
    }
    FamilySequence::new(tower.clone(), families)
}

/// Loads and validates a sequence file against its declared mode.
pub fn load_sequence(path: &Path, strict: bool, limits: &Limits) -> Result<SequenceDoc> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let group_ref = v
        .get("group")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Input("sequence file needs a \"group\" string".into()))?
        .to_string();
    let max_arity = usize_of(v.get("max_arity").unwrap_or(&Value::Null), "max_arity")?;
    let group = Arc::new(load_group(&group_ref, path.parent(), limits)?);
    let tower = Arc::new(build_tower(group.clone(), max_arity, limits)?);
    let mode = parse_mode(&group, v.get("mode").unwrap_or(&json!("n_infinity")), limits)?;
    let sequence = parse_families(&tower, v.get("families").unwrap_or(&Value::Null), strict)?;
    if let Some(coverage) = mode.coverage() {
        if let Err(violation) = validate_n_infinity(&sequence, &coverage)? {
            return Err(Error::InvalidSequence(violation.to_string()));
        }
    }
    Ok(SequenceDoc { group: group_ref, mode, sequence })
}

/// A tower, refusing arities whose `G x S_n` exceeds the order cap.
pub fn build_tower(group: Arc<FiniteGroup>, max_arity: usize, limits: &Limits) -> Result<ProductTower> {
    let max = max_feasible_arity(group.order(), limits);
    if max_arity > max {
        return Err(Error::ArityOutOfRange { arity: max_arity, max });
    }
    ProductTower::new(group, max_arity, *limits)
}

fn max_feasible_arity(order: usize, limits: &Limits) -> usize {
    let mut n = 0;
    let mut f = 1usize;
    loop {
        let next = f.saturating_mul(n + 1);
        if order.saturating_mul(next) > limits.max_order {
            return n;
        }
        n += 1;
        f = next;
    }
}

pub fn witness_json(tower: &ProductTower, w: &Witness) -> Result<Value> {
    Ok(json!({
        "n": w.arity,
        "parts": w.parts,
        "H": w.h.elements(),
        "rho_k": rho_json(tower, &w.h, &w.outer, w.parts.len()),
        "rho_parts": w.blocks.iter().zip(&w.parts).map(|(b, &p)| rho_json(tower, &w.h, b, p)).collect::<Vec<_>>(),
        "rho": rho_json(tower, &w.h, &w.composite, w.arity),
        "gamma": descriptor_json(tower, w.arity, &w.gamma)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FamilyKind;

    fn tower(spec: &str, n: usize) -> Arc<ProductTower> {
        let l = Limits::default();
        Arc::new(ProductTower::new(Arc::new(make_builtin(spec, &l).unwrap()), n, l).unwrap())
    }

    #[test]
    fn descriptors_roundtrip() {
        let t = tower("S3", 3);
        for n in 0..=3 {
            for m in FamilySequence::uniform(t.clone(), &FamilyKind::AllGraphs).unwrap().family(n).unwrap().iter() {
                let v = descriptor_json(&t, n, m).unwrap();
                assert_eq!(&parse_descriptor(&t, n, &v).unwrap(), m);
            }
        }
    }

    #[test]
    fn graph_shorthand() {
        let t = tower("C2", 2);
        let v = json!({"graph": {"H": [0, 1], "rho": {"0": [0, 1], "1": [1, 0]}}});
        let s = parse_descriptor(&t, 2, &v).unwrap();
        assert_eq!(s.elements(), &[0, 3]);
        let bad = json!({"graph": {"H": [0, 1], "rho": {"0": [0, 1]}}});
        assert!(parse_descriptor(&t, 2, &bad).is_err());
        let not_sub = json!({"elements": [[0, [0, 1]], [1, [0, 1]], [0, [1, 0]]]});
        assert!(parse_descriptor(&t, 2, &not_sub).is_err());
        let short = json!({"elements": [[0, [0]]]});
        assert!(parse_descriptor(&t, 2, &short).is_err());
    }

    #[test]
    fn sequence_json_roundtrip() {
        let t = tower("K4", 2);
        let seq = FamilySequence::uniform(t.clone(), &FamilyKind::AllGraphs).unwrap();
        let v = families_json(&seq).unwrap();
        assert_eq!(parse_families(&t, &v, true).unwrap(), seq);
        let doc = SequenceDoc { group: "K4".into(), mode: Mode::NInfinity, sequence: seq };
        let a = canonical(&doc.to_json().unwrap());
        assert!(a.find("\"families\"").unwrap() < a.find("\"group\"").unwrap());
        assert!(a.ends_with("}\n"));
    }

    #[test]
    fn strict_loading_rejects_unclosed_levels() {
        let t = tower("C2", 2);
        let v = json!([[{"elements": [[0, []]]}, {"elements": [[0, []], [1, []]]}],
                       [{"elements": [[0, [0]]]}, {"elements": [[0, [0]], [1, [0]]]}],
                       [{"elements": [[0, [0, 1]], [1, [1, 0]]]}]]);
        assert!(matches!(parse_families(&t, &v, true), Err(Error::InvalidSequence(_))));
        let closed = parse_families(&t, &v, false).unwrap();
        assert_eq!(closed.family(2).unwrap().len(), 2);
    }

    #[test]
    fn feasible_arity() {
        let l = Limits::default();
        assert_eq!(max_feasible_arity(1, &l), 6);
        assert_eq!(max_feasible_arity(2, &l), 6);
        assert_eq!(max_feasible_arity(8, &l), 5);
        assert!(matches!(
            build_tower(Arc::new(make_builtin("C2", &l).unwrap()), 7, &l),
            Err(Error::ArityOutOfRange { arity: 7, max: 6 })
        ));
    }
}
