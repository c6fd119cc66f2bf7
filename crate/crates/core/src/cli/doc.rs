//! JSON documents: `{kind, version, payload}`. Integers travel as strings
//! (plain JSON integers are accepted too); complex vertices may be "p/q".

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::CliError;
use crate::hyperdual::LatticePolytope;
use crate::kweight::KWeighting;
use crate::lattice::{IntMatrix, IntVector, Rat, RatVector};
use crate::polyhedral::{build_complex, Fan, PolyhedralComplex, Polyhedron};
use crate::torick::KClass;

pub const VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Fan,
    Complex,
    Weighting,
    KClass,
    Projection,
    Polytope,
    Lift,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Fan => "fan",
            Kind::Complex => "complex",
            Kind::Weighting => "weighting",
            Kind::KClass => "kclass",
            Kind::Projection => "projection",
            Kind::Polytope => "polytope",
            Kind::Lift => "lift",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        Some(match s {
            "fan" => Kind::Fan,
            "complex" => Kind::Complex,
            "weighting" => Kind::Weighting,
            "kclass" => Kind::KClass,
            "projection" => Kind::Projection,
            "polytope" => Kind::Polytope,
            "lift" => Kind::Lift,
            _ => return None,
        })
    }
}

/// The complex a weighting lives on; fans keep their ray order.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Fan(Fan),
    Complex(Arc<PolyhedralComplex>),
}

impl Base {
    pub fn complex(&self) -> Arc<PolyhedralComplex> {
        match self {
            Base::Fan(f) => f.complex_arc(),
            Base::Complex(c) => c.clone(),
        }
    }

    /// The base as a fan, when it is one.
    pub fn fan(&self) -> Option<Fan> {
        match self {
            Base::Fan(f) => Some(f.clone()),
            Base::Complex(c) => Fan::from_complex(c.clone()).ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightingDoc {
    pub base: Base,
    pub weights: KWeighting,
}

/// Exponent maps keyed by ray index; resolved against a fan later.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClassDoc {
    pub terms: Vec<(BTreeMap<usize, i64>, BigInt)>,
}

impl KClassDoc {
    pub fn to_class(&self, nrays: usize) -> Result<KClass, CliError> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (i, (exps, c)) in self.terms.iter().enumerate() {
            let mut e = vec![0i64; nrays];
            for (&r, &x) in exps {
                if r >= nrays {
                    return Err(CliError::schema(
                        format!("$.payload.terms[{i}].exponents.{r}"),
                        format!("ray index {r} but the fan has {nrays} rays"),
                    ));
                }
                e[r] = x;
            }
            out.push((e, c.clone()));
        }
        Ok(KClass::from_terms(nrays, out))
    }

    pub fn from_class(k: &KClass) -> Self {
        KClassDoc {
            terms: k
                .terms()
                .iter()
                .map(|(e, c)| (e.iter().enumerate().filter(|(_, x)| **x != 0).map(|(i, x)| (i, *x)).collect(), c.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftDoc {
    pub heights: BTreeMap<IntVector, BigInt>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Fan(Fan),
    Complex(Arc<PolyhedralComplex>),
    Weighting(WeightingDoc),
    KClass(KClassDoc),
    Projection(IntMatrix),
    Polytope(LatticePolytope),
    Lift(LiftDoc),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub version: String,
    pub payload: Payload,
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Document { version: VERSION.to_string(), payload }
    }

    pub fn kind(&self) -> Kind {
        match self.payload {
            Payload::Fan(_) => Kind::Fan,
            Payload::Complex(_) => Kind::Complex,
            Payload::Weighting(_) => Kind::Weighting,
            Payload::KClass(_) => Kind::KClass,
            Payload::Projection(_) => Kind::Projection,
            Payload::Polytope(_) => Kind::Polytope,
            Payload::Lift(_) => Kind::Lift,
        }
    }
}

/// Resolves `complex_ref` strings (file references) to document text.
pub type Resolver<'a> = &'a dyn Fn(&str) -> Result<String, String>;

pub fn parse_document(text: &str) -> Result<Document, CliError> {
    parse_document_with(text, &|r: &str| Err(format!("cannot resolve reference {r:?} without a base directory")))
}

pub fn parse_document_with(text: &str, resolve: Resolver) -> Result<Document, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::schema("$", format!("invalid JSON: {e}")))?;
    parse_value(&v, "$", resolve, 0)
}

fn parse_value(v: &Value, path: &str, resolve: Resolver, depth: usize) -> Result<Document, CliError> {
    let obj = v.as_object().ok_or_else(|| CliError::schema(path, "expected an object"))?;
    let kind_s = field(obj, "kind", path)?.as_str().ok_or_else(|| CliError::schema(format!("{path}.kind"), "expected a string"))?;
    let kind = Kind::parse(kind_s).ok_or_else(|| CliError::UnknownKind(kind_s.to_string()))?;
    let version = match obj.get("version") {
        None => VERSION.to_string(),
        Some(Value::String(s)) if s == VERSION => s.clone(),
        Some(other) => return Err(CliError::VersionUnsupported(other.to_string())),
    };
    let pp = format!("{path}.payload");
    let p = field(obj, "payload", path)?;
    let pobj = p.as_object().ok_or_else(|| CliError::schema(&pp, "expected an object"))?;
    let payload = match kind {
        Kind::Fan => Payload::Fan(parse_fan(pobj, &pp)?),
        Kind::Complex => Payload::Complex(Arc::new(parse_complex(pobj, &pp)?)),
        Kind::Weighting => Payload::Weighting(parse_weighting(pobj, &pp, resolve, depth)?),
        Kind::KClass => Payload::KClass(parse_kclass(pobj, &pp)?),
        Kind::Projection => Payload::Projection(parse_matrix(field(pobj, "matrix", &pp)?, &format!("{pp}.matrix"))?),
        Kind::Polytope => {
            let vs = int_rows(field(pobj, "vertices", &pp)?, &format!("{pp}.vertices"))?;
            Payload::Polytope(LatticePolytope::new(vs).map_err(|e| CliError::schema(format!("{pp}.vertices"), e.to_string()))?)
        }
        Kind::Lift => Payload::Lift(parse_lift(pobj, &pp)?),
    };
    Ok(Document { version, payload })
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| CliError::schema(format!("{path}.{key}"), "missing field"))
}

fn arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::schema(path, "expected an array"))
}

fn int(v: &Value, path: &str) -> Result<BigInt, CliError> {
    match v {
        Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| CliError::schema(path, format!("not an integer: {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| CliError::schema(path, format!("not an integer: {n}"))),
        _ => Err(CliError::schema(path, "expected an integer string")),
    }
}

fn rat(v: &Value, path: &str) -> Result<Rat, CliError> {
    if let Value::String(s) = v {
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| CliError::schema(path, format!("not a rational: {s:?}")))?;
            let b: BigInt = b.trim().parse().map_err(|_| CliError::schema(path, format!("not a rational: {s:?}")))?;
            if b == BigInt::from(0) {
                return Err(CliError::schema(path, "zero denominator"));
            }
            return Ok(Rat::new(a, b));
        }
    }
    Ok(Rat::from_integer(int(v, path)?))
}

fn index(v: &Value, path: &str) -> Result<usize, CliError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| CliError::schema(path, "expected a non-negative index"))
}

fn int_rows(v: &Value, path: &str) -> Result<Vec<IntVector>, CliError> {
    let rows = arr(v, path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = arr(r, &rp)?.iter().enumerate().map(|(j, x)| int(x, &format!("{rp}[{j}]"))).collect::<Result<_, _>>()?;
        out.push(IntVector::new(entries));
    }
    if let Some(w) = out.first().map(|r| r.rank()) {
        if let Some(i) = out.iter().position(|r| r.rank() != w) {
            return Err(CliError::schema(format!("{path}[{i}]"), format!("expected {w} entries")));
        }
    }
    Ok(out)
}

fn parse_matrix(v: &Value, path: &str) -> Result<IntMatrix, CliError> {
    let rows = int_rows(v, path)?;
    let cols = rows.first().map(|r| r.rank()).ok_or_else(|| CliError::schema(path, "empty matrix"))?;
    IntMatrix::from_rows(&rows.into_iter().map(|r| r.entries).collect::<Vec<_>>(), cols)
        .map_err(|e| CliError::schema(path, e.to_string()))
}

fn index_lists(v: &Value, path: &str) -> Result<Vec<Vec<usize>>, CliError> {
    arr(v, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let cp = format!("{path}[{i}]");
            arr(c, &cp)?.iter().enumerate().map(|(j, x)| index(x, &format!("{cp}[{j}]"))).collect()
        })
        .collect()
}

fn rank_field(obj: &Map<String, Value>, path: &str) -> Result<Option<usize>, CliError> {
    obj.get("rank").map(|r| index(r, &format!("{path}.rank"))).transpose()
}

fn parse_fan(obj: &Map<String, Value>, path: &str) -> Result<Fan, CliError> {
    let rays = int_rows(field(obj, "rays", path)?, &format!("{path}.rays"))?;
    let cones = index_lists(field(obj, "cones", path)?, &format!("{path}.cones"))?;
    let rank = match (rank_field(obj, path)?, rays.first()) {
        (Some(r), _) => r,
        (None, Some(r)) => r.rank(),
        (None, None) => return Err(CliError::schema(format!("{path}.rank"), "required when there are no rays")),
    };
    Fan::new(rank, rays, cones).map_err(|e| CliError::schema(path, e.to_string()))
}

fn parse_complex(obj: &Map<String, Value>, path: &str) -> Result<PolyhedralComplex, CliError> {
    let vp = format!("{path}.vertices");
    let mut verts = Vec::new();
    for (i, r) in arr(field(obj, "vertices", path)?, &vp)?.iter().enumerate() {
        let rp = format!("{vp}[{i}]");
        let e = arr(r, &rp)?.iter().enumerate().map(|(j, x)| rat(x, &format!("{rp}[{j}]"))).collect::<Result<_, _>>()?;
        verts.push(RatVector::new(e));
    }
    let rays = match obj.get("ray_generators") {
        Some(v) => int_rows(v, &format!("{path}.ray_generators"))?,
        None => vec![],
    };
    let rank = match rank_field(obj, path)? {
        Some(r) => r,
        None => verts
            .first()
            .map(|v| v.rank())
            .ok_or_else(|| CliError::schema(format!("{path}.rank"), "required when there are no vertices"))?,
    };
    if let Some(i) = verts.iter().position(|v| v.rank() != rank) {
        return Err(CliError::schema(format!("{vp}[{i}]"), format!("expected {rank} coordinates")));
    }
    if let Some(i) = rays.iter().position(|v| v.rank() != rank) {
        return Err(CliError::schema(format!("{path}.ray_generators[{i}]"), format!("expected {rank} coordinates")));
    }
    let cp = format!("{path}.cells");
    let mut cells = Vec::new();
    for (i, c) in arr(field(obj, "cells", path)?, &cp)?.iter().enumerate() {
        let ip = format!("{cp}[{i}]");
        let co = c.as_object().ok_or_else(|| CliError::schema(&ip, "expected an object"))?;
        let vi: Vec<usize> = match co.get("vertices") {
            Some(v) => arr(v, &format!("{ip}.vertices"))?.iter().enumerate().map(|(j, x)| index(x, &format!("{ip}.vertices[{j}]"))).collect::<Result<_, _>>()?,
            None => vec![],
        };
        let ri: Vec<usize> = match co.get("rays") {
            Some(v) => arr(v, &format!("{ip}.rays"))?.iter().enumerate().map(|(j, x)| index(x, &format!("{ip}.rays[{j}]"))).collect::<Result<_, _>>()?,
            None => vec![],
        };
        if let Some(&bad) = vi.iter().find(|&&j| j >= verts.len()) {
            return Err(CliError::schema(format!("{ip}.vertices"), format!("vertex index {bad} out of range")));
        }
        if let Some(&bad) = ri.iter().find(|&&j| j >= rays.len()) {
            return Err(CliError::schema(format!("{ip}.rays"), format!("ray index {bad} out of range")));
        }
        let p = Polyhedron::new(rank, vi.iter().map(|&j| verts[j].clone()).collect(), ri.iter().map(|&j| rays[j].clone()).collect())
            .map_err(|e| CliError::schema(&ip, e.to_string()))?;
        cells.push(p);
    }
    build_complex(rank, cells).map_err(|e| CliError::schema(&cp, e.to_string()))
}

fn parse_weighting(obj: &Map<String, Value>, path: &str, resolve: Resolver, depth: usize) -> Result<WeightingDoc, CliError> {
    let rp = format!("{path}.complex_ref");
    let r = field(obj, "complex_ref", path)?;
    let doc = match r {
        Value::String(s) => {
            if depth > 4 {
                return Err(CliError::schema(&rp, "reference chain too deep"));
            }
            let text = resolve(s).map_err(|e| CliError::schema(&rp, e))?;
            parse_document_with(&text, resolve).map_err(|e| e.nested(&rp))?
        }
        other => parse_value(other, &rp, resolve, depth + 1)?,
    };
    let base = match doc.payload {
        Payload::Fan(f) => Base::Fan(f),
        Payload::Complex(c) => Base::Complex(c),
        _ => return Err(CliError::schema(&rp, "must refer to a fan or complex")),
    };
    let wp = format!("{path}.weights");
    let wobj = field(obj, "weights", path)?.as_object().ok_or_else(|| CliError::schema(&wp, "expected an object"))?;
    let complex = base.complex();
    let mut weights = KWeighting::zero(complex.clone());
    for (id, w) in wobj {
        let i = complex.find(id).ok_or_else(|| CliError::schema(format!("{wp}.{id}"), format!("unknown cell id {id}")))?;
        weights.set(i, int(w, &format!("{wp}.{id}"))?);
    }
    Ok(WeightingDoc { base, weights })
}

fn parse_kclass(obj: &Map<String, Value>, path: &str) -> Result<KClassDoc, CliError> {
    let tp = format!("{path}.terms");
    let mut terms = Vec::new();
    for (i, t) in arr(field(obj, "terms", path)?, &tp)?.iter().enumerate() {
        let ip = format!("{tp}[{i}]");
        let to = t.as_object().ok_or_else(|| CliError::schema(&ip, "expected an object"))?;
        let ep = format!("{ip}.exponents");
        let eobj = field(to, "exponents", &ip)?.as_object().ok_or_else(|| CliError::schema(&ep, "expected an object"))?;
        let mut exps = BTreeMap::new();
        for (k, v) in eobj {
            let r: usize = k.parse().map_err(|_| CliError::schema(format!("{ep}.{k}"), "ray keys are indices"))?;
            let x = v.as_i64().or_else(|| v.as_str().and_then(|s| s.parse().ok()));
            exps.insert(r, x.ok_or_else(|| CliError::schema(format!("{ep}.{k}"), "expected an integer"))?);
        }
        terms.push((exps, int(field(to, "coeff", &ip)?, &format!("{ip}.coeff"))?));
    }
    Ok(KClassDoc { terms })
}

fn parse_lift(obj: &Map<String, Value>, path: &str) -> Result<LiftDoc, CliError> {
    let hp = format!("{path}.heights");
    let mut heights = BTreeMap::new();
    for (i, t) in arr(field(obj, "heights", path)?, &hp)?.iter().enumerate() {
        let ip = format!("{hp}[{i}]");
        let to = t.as_object().ok_or_else(|| CliError::schema(&ip, "expected an object"))?;
        let pp = format!("{ip}.point");
        let pt = arr(field(to, "point", &ip)?, &pp)?.iter().enumerate().map(|(j, x)| int(x, &format!("{pp}[{j}]"))).collect::<Result<_, _>>()?;
        let h = int(field(to, "height", &ip)?, &format!("{ip}.height"))?;
        if heights.insert(IntVector::new(pt), h).is_some() {
            return Err(CliError::schema(&ip, "duplicate point"));
        }
    }
    Ok(LiftDoc { heights })
}

// ---- serialization

fn s(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

fn int_row(v: &IntVector) -> Value {
    Value::Array(v.entries.iter().map(s).collect())
}

fn rat_s(x: &Rat) -> Value {
    Value::String(if x.is_integer() { x.numer().to_string() } else { format!("{}/{}", x.numer(), x.denom()) })
}

pub fn fan_payload(f: &Fan) -> Value {
    let g = f.complex();
    let maximal = g.maximal_cells();
    let cones: Vec<Value> = maximal.iter().filter(|&&i| g.cell_dim(i) > 0).map(|&i| json!(f.cones()[i])).collect();
    json!({"rank": f.rank(), "rays": f.rays().iter().map(int_row).collect::<Vec<_>>(), "cones": cones})
}

pub fn complex_payload(g: &PolyhedralComplex) -> Value {
    let maximal = g.maximal_cells();
    let mut verts: Vec<RatVector> = maximal.iter().flat_map(|&i| g.poly(i).vertices().to_vec()).collect();
    verts.sort();
    verts.dedup();
    let mut rays: Vec<IntVector> = maximal.iter().flat_map(|&i| g.poly(i).rays().to_vec()).collect();
    rays.sort();
    rays.dedup();
    let cells: Vec<Value> = maximal
        .iter()
        .map(|&i| {
            let p = g.poly(i);
            let vi: Vec<usize> = p.vertices().iter().map(|v| verts.binary_search(v).unwrap()).collect();
            let ri: Vec<usize> = p.rays().iter().map(|r| rays.binary_search(r).unwrap()).collect();
            json!({"vertices": vi, "rays": ri})
        })
        .collect();
    json!({
        "rank": g.rank(),
        "vertices": verts.iter().map(|v| Value::Array(v.entries.iter().map(rat_s).collect())).collect::<Vec<_>>(),
        "ray_generators": rays.iter().map(int_row).collect::<Vec<_>>(),
        "cells": cells,
    })
}

pub fn weights_map(k: &KWeighting) -> Value {
    Value::Object(k.to_map().iter().map(|(id, w)| (id.clone(), s(w))).collect())
}

pub fn serialize(doc: &Document) -> Value {
    let payload = match &doc.payload {
        Payload::Fan(f) => fan_payload(f),
        Payload::Complex(c) => complex_payload(c),
        Payload::Weighting(w) => {
            let base = match &w.base {
                Base::Fan(f) => Document::new(Payload::Fan(f.clone())),
                Base::Complex(c) => Document::new(Payload::Complex(c.clone())),
            };
            json!({"complex_ref": serialize(&base), "weights": weights_map(&w.weights)})
        }
        Payload::KClass(k) => json!({"terms": k.terms.iter().map(|(e, c)| {
            let ex: Map<String, Value> = e.iter().map(|(r, x)| (r.to_string(), json!(x))).collect();
            json!({"exponents": ex, "coeff": s(c)})
        }).collect::<Vec<_>>()}),
        Payload::Projection(m) => json!({"matrix": m.row_vecs().iter().map(|r| Value::Array(r.iter().map(s).collect())).collect::<Vec<_>>()}),
        Payload::Polytope(p) => json!({"vertices": p.vertices().iter().map(int_row).collect::<Vec<_>>()}),
        Payload::Lift(l) => json!({"heights": l.heights.iter().map(|(p, h)| json!({"point": int_row(p), "height": s(h)})).collect::<Vec<_>>()}),
    };
    json!({"kind": doc.kind().name(), "version": doc.version, "payload": payload})
}

pub fn to_text(doc: &Document) -> String {
    serde_json::to_string_pretty(&serialize(doc)).expect("serializable") + "\n"
}
