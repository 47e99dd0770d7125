//! Problem instances as JSON: a transition matrix, an optional group
//! structure, and search options. Scalars travel as strings ("p/q" or
//! "[m; c0, c1, ...]"), Laurent polynomials as exponent-to-scalar maps,
//! ordinary polynomials as coefficient lists, and two-variable parameter
//! polynomials as maps keyed "t_exp,z_exp".

use serde_json::{json, Map, Value};

use crate::bundle::BundleDesc;
use crate::equivariant::{finite_closure, FiniteElement, GammaStructure, Mobius};
use crate::error::Error;
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::mpoly::{MPoly, MPolyMatrix};
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, RatMat};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub seed: u64,
    pub conductor_max: u32,
    pub coeff_bound: i64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            conductor_max: 24,
            coeff_bound: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub bundle: BundleDesc,
    pub gamma: Option<GammaStructure>,
    pub options: Options,
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance, Error> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
        Instance::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Instance, Error> {
        let obj = as_object(v, "instance")?;
        let name = match obj.get("name") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::Parse("name must be a string".into())),
            None => "unnamed".into(),
        };
        let bundle_v = obj
            .get("bundle")
            .ok_or_else(|| Error::Parse("missing bundle".into()))?;
        let bundle_obj = as_object(bundle_v, "bundle")?;
        let trans_v = bundle_obj
            .get("transition")
            .ok_or_else(|| Error::Parse("missing bundle.transition".into()))?;
        let transition = laurent_matrix_from_json(trans_v)?;
        let bundle = BundleDesc::new(transition)?;
        let gamma = match obj.get("gamma") {
            None | Some(Value::Null) => None,
            Some(g) => Some(gamma_from_json(g)?),
        };
        if let Some(g) = &gamma {
            if g.rank() != bundle.rank() {
                return Err(Error::Parse("gamma rank does not match the bundle".into()));
            }
        }
        let mut options = Options::default();
        if let Some(o) = obj.get("options") {
            let o = as_object(o, "options")?;
            if let Some(s) = o.get("seed") {
                options.seed = s
                    .as_u64()
                    .ok_or_else(|| Error::Parse("seed must be an unsigned integer".into()))?;
            }
            if let Some(c) = o.get("conductor_max") {
                options.conductor_max = c
                    .as_u64()
                    .ok_or_else(|| Error::Parse("conductor_max must be an integer".into()))?
                    as u32;
            }
            if let Some(b) = o.get("coeff_bound") {
                options.coeff_bound = b
                    .as_i64()
                    .ok_or_else(|| Error::Parse("coeff_bound must be an integer".into()))?;
            }
        }
        Ok(Instance {
            name,
            bundle,
            gamma,
            options,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("name".into(), json!(self.name));
        obj.insert(
            "bundle".into(),
            json!({ "transition": laurent_matrix_to_json(self.bundle.transition()) }),
        );
        if let Some(g) = &self.gamma {
            obj.insert("gamma".into(), gamma_to_json(g));
        }
        obj.insert(
            "options".into(),
            json!({
                "seed": self.options.seed,
                "conductor_max": self.options.conductor_max,
                "coeff_bound": self.options.coeff_bound,
            }),
        );
        Value::Object(obj)
    }
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn scalar_from_json(v: &Value, what: &str) -> Result<Scalar, Error> {
    match v {
        Value::String(s) => Scalar::parse(s),
        Value::Number(n) => n
            .as_i64()
            .map(Scalar::from_int)
            .ok_or_else(|| Error::Parse(format!("{what}: non-integer number"))),
        _ => Err(Error::Parse(format!("{what}: expected a scalar string"))),
    }
}

pub fn laurent_from_json(v: &Value) -> Result<LaurentPoly, Error> {
    let obj = as_object(v, "laurent polynomial")?;
    let mut terms = vec![];
    for (k, val) in obj {
        let exp: i64 = k
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent key {k:?}")))?;
        terms.push((exp, scalar_from_json(val, "laurent coefficient")?));
    }
    Ok(LaurentPoly::from_terms(terms))
}

pub fn laurent_to_json(p: &LaurentPoly) -> Value {
    let mut obj = Map::new();
    for (e, c) in p.terms() {
        obj.insert(e.to_string(), json!(c.to_string_repr()));
    }
    Value::Object(obj)
}

pub fn laurent_matrix_from_json(v: &Value) -> Result<LaurentMatrix, Error> {
    let rows = as_array(v, "matrix")?;
    let entries = rows
        .iter()
        .map(|r| {
            as_array(r, "matrix row")?
                .iter()
                .map(laurent_from_json)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    LaurentMatrix::new(entries)
}

pub fn laurent_matrix_to_json(m: &LaurentMatrix) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(laurent_to_json).collect()))
            .collect(),
    )
}

pub fn poly_from_json(v: &Value) -> Result<Poly, Error> {
    let coeffs = as_array(v, "polynomial")?
        .iter()
        .map(|c| scalar_from_json(c, "polynomial coefficient"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Poly::from_coeffs(coeffs))
}

pub fn poly_to_json(p: &Poly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| json!(c.to_string_repr()))
            .collect(),
    )
}

/// A rational function is either a coefficient list (polynomial) or
/// {"num": [...], "den": [...]}.
pub fn ratfunc_from_json(v: &Value) -> Result<RatFunc, Error> {
    match v {
        Value::Array(_) => Ok(RatFunc::from_poly(poly_from_json(v)?)),
        Value::Object(o) => {
            let num = poly_from_json(
                o.get("num")
                    .ok_or_else(|| Error::Parse("rational function missing num".into()))?,
            )?;
            let den = match o.get("den") {
                Some(d) => poly_from_json(d)?,
                None => Poly::one(),
            };
            RatFunc::new(num, den)
        }
        _ => Err(Error::Parse("expected a rational function".into())),
    }
}

pub fn ratfunc_to_json(f: &RatFunc) -> Value {
    if f.is_polynomial() {
        poly_to_json(&f.as_polynomial().unwrap())
    } else {
        json!({ "num": poly_to_json(f.num()), "den": poly_to_json(f.den()) })
    }
}

fn ratmat_from_json(v: &Value) -> Result<RatMat, Error> {
    as_array(v, "lift")?
        .iter()
        .map(|r| {
            as_array(r, "lift row")?
                .iter()
                .map(ratfunc_from_json)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect()
}

fn ratmat_to_json(m: &RatMat) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(ratfunc_to_json).collect()))
            .collect(),
    )
}

fn mobius_from_json(v: &Value) -> Result<Mobius, Error> {
    let a = as_array(v, "mobius")?;
    if a.len() != 4 {
        return Err(Error::Parse("mobius needs four entries".into()));
    }
    Mobius::new(
        scalar_from_json(&a[0], "mobius")?,
        scalar_from_json(&a[1], "mobius")?,
        scalar_from_json(&a[2], "mobius")?,
        scalar_from_json(&a[3], "mobius")?,
    )
}

fn mobius_to_json(m: &Mobius) -> Value {
    json!([
        m.a.to_string_repr(),
        m.b.to_string_repr(),
        m.c.to_string_repr(),
        m.d.to_string_repr(),
    ])
}

/// Parameter polynomials: map from "t_exp,z_exp" to scalar strings.
pub fn mpoly_from_json(v: &Value) -> Result<MPoly, Error> {
    let obj = as_object(v, "parameter polynomial")?;
    let mut terms = vec![];
    for (k, val) in obj {
        let parts: Vec<&str> = k.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("bad exponent key {k:?}")));
        }
        let t: i64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad t exponent in {k:?}")))?;
        let z: i64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad z exponent in {k:?}")))?;
        let mut exps = [0i64; 3];
        exps[crate::mpoly::VAR_T] = t;
        exps[crate::mpoly::VAR_Z] = z;
        terms.push((exps, scalar_from_json(val, "parameter coefficient")?));
    }
    Ok(MPoly::from_terms(terms))
}

pub fn mpoly_to_json(p: &MPoly) -> Value {
    let mut obj = Map::new();
    for (e, c) in p.terms() {
        let key = format!("{},{}", e[crate::mpoly::VAR_T], e[crate::mpoly::VAR_Z]);
        obj.insert(key, json!(c.to_string_repr()));
    }
    Value::Object(obj)
}

fn mpoly_matrix_from_json(v: &Value) -> Result<MPolyMatrix, Error> {
    let entries = as_array(v, "lift")?
        .iter()
        .map(|r| {
            as_array(r, "lift row")?
                .iter()
                .map(mpoly_from_json)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    MPolyMatrix::new(entries)
}

fn mpoly_matrix_to_json(m: &MPolyMatrix) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(mpoly_to_json).collect()))
            .collect(),
    )
}

pub fn gamma_from_json(v: &Value) -> Result<GammaStructure, Error> {
    let obj = as_object(v, "gamma")?;
    let kind = obj
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Parse("gamma.kind missing".into()))?;
    match kind {
        "finite" => {
            if let Some(gens) = obj.get("generators") {
                let gens = as_array(gens, "generators")?
                    .iter()
                    .map(|g| {
                        let g = as_object(g, "generator")?;
                        let mobius = match g.get("mobius") {
                            Some(m) => mobius_from_json(m)?,
                            None => Mobius::identity(),
                        };
                        let lift = ratmat_from_json(
                            g.get("lift")
                                .ok_or_else(|| Error::Parse("generator missing lift".into()))?,
                        )?;
                        Ok((mobius, lift))
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                return finite_closure(gens, 48);
            }
            let elements = as_array(
                obj.get("elements")
                    .ok_or_else(|| Error::Parse("finite gamma missing elements".into()))?,
                "elements",
            )?
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let e = as_object(e, "element")?;
                let label = e
                    .get("label")
                    .and_then(|l| l.as_str())
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("g{i}"));
                let mobius = match e.get("mobius") {
                    Some(m) => mobius_from_json(m)?,
                    None => Mobius::identity(),
                };
                let lift = ratmat_from_json(
                    e.get("lift")
                        .ok_or_else(|| Error::Parse("element missing lift".into()))?,
                )?;
                Ok(FiniteElement {
                    label,
                    mobius,
                    lift,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
            let table = as_array(
                obj.get("table")
                    .ok_or_else(|| Error::Parse("finite gamma missing table".into()))?,
                "table",
            )?
            .iter()
            .map(|row| {
                as_array(row, "table row")?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|u| u as usize)
                            .ok_or_else(|| Error::Parse("table entries must be indices".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
            Ok(GammaStructure::Finite { elements, table })
        }
        "mult" => {
            let q = obj
                .get("q")
                .and_then(|q| q.as_i64())
                .ok_or_else(|| Error::Parse("mult gamma missing integer q".into()))?;
            let lift = mpoly_matrix_from_json(
                obj.get("lift")
                    .ok_or_else(|| Error::Parse("mult gamma missing lift".into()))?,
            )?;
            Ok(GammaStructure::OneParamMult { q, lift })
        }
        "add" => {
            let moves_base = obj
                .get("moves_base")
                .map(|m| {
                    m.as_bool()
                        .ok_or_else(|| Error::Parse("moves_base must be a boolean".into()))
                })
                .transpose()?
                .unwrap_or(false);
            let lift = mpoly_matrix_from_json(
                obj.get("lift")
                    .ok_or_else(|| Error::Parse("add gamma missing lift".into()))?,
            )?;
            Ok(GammaStructure::OneParamAdd { moves_base, lift })
        }
        other => Err(Error::Parse(format!("unknown gamma kind {other:?}"))),
    }
}

pub fn gamma_to_json(g: &GammaStructure) -> Value {
    match g {
        GammaStructure::Finite { elements, table } => {
            json!({
                "kind": "finite",
                "elements": elements
                    .iter()
                    .map(|e| json!({
                        "label": e.label,
                        "mobius": mobius_to_json(&e.mobius),
                        "lift": ratmat_to_json(&e.lift),
                    }))
                    .collect::<Vec<_>>(),
                "table": table,
            })
        }
        GammaStructure::OneParamMult { q, lift } => json!({
            "kind": "mult",
            "q": q,
            "lift": mpoly_matrix_to_json(lift),
        }),
        GammaStructure::OneParamAdd { moves_base, lift } => json!({
            "kind": "add",
            "moves_base": moves_base,
            "lift": mpoly_matrix_to_json(lift),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "name": "twisted-extension",
        "bundle": { "transition": [[{"2": "1"}, {"0": "1"}], [{}, {"0": "1"}]] },
        "options": { "seed": 7, "conductor_max": 12, "coeff_bound": 3 }
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let inst = Instance::parse(SAMPLE).unwrap();
        assert_eq!(inst.name, "twisted-extension");
        assert_eq!(inst.bundle.rank(), 2);
        assert_eq!(inst.options.seed, 7);
        let again = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(again.bundle.degree(), inst.bundle.degree());
        assert!(again
            .bundle
            .transition()
            .sub(inst.bundle.transition())
            .is_zero());
    }

    #[test]
    fn parse_finite_gamma_from_generators() {
        let text = r#"{
            "name": "swap",
            "bundle": { "transition": [[{"0":"1"},{}],[{},{"0":"1"}]] },
            "gamma": { "kind": "finite", "generators": [
                { "lift": [[["0"],["1"]],[["1"],["0"]]] }
            ]}
        }"#;
        let inst = Instance::parse(text).unwrap();
        let Some(GammaStructure::Finite { elements, .. }) = &inst.gamma else {
            panic!("expected finite gamma")
        };
        assert_eq!(elements.len(), 2);
        // round-trip through explicit elements + table
        let v = inst.to_json();
        let again = Instance::from_json(&v).unwrap();
        let Some(GammaStructure::Finite { elements: e2, .. }) = &again.gamma else {
            panic!()
        };
        assert_eq!(e2.len(), 2);
    }

    #[test]
    fn parse_one_param_gamma() {
        let text = r#"{
            "name": "unipotent",
            "bundle": { "transition": [[{"0":"1"},{}],[{},{"0":"1"}]] },
            "gamma": { "kind": "add", "lift": [
                [{"0,0":"1"}, {"1,0":"1"}],
                [{}, {"0,0":"1"}]
            ]}
        }"#;
        let inst = Instance::parse(text).unwrap();
        let Some(g) = &inst.gamma else { panic!() };
        let rep = crate::equivariant::validate_action(&[0, 0], g).unwrap();
        assert!(rep.is_valid(), "{:?}", rep.failures);
    }

    #[test]
    fn scalar_strings_with_cyclotomics() {
        let z = Scalar::zeta(8);
        let s = z.to_string_repr();
        assert_eq!(Scalar::parse(&s).unwrap(), z);
        let v = json!(s);
        assert_eq!(scalar_from_json(&v, "test").unwrap(), z);
    }

    #[test]
    fn bad_inputs_are_parse_errors() {
        assert!(matches!(
            Instance::parse("{"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Instance::parse(r#"{"name": "x"}"#),
            Err(Error::Parse(_))
        ));
        // singular transition is a bundle error, not a parse error
        let text = r#"{"bundle": {"transition": [[{"0":"1"},{"0":"1"}],[{"0":"1"},{"0":"1"}]]}}"#;
        assert!(matches!(Instance::parse(text), Err(Error::NotABundle(_))));
    }
}
