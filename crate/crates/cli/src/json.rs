use pso_core::classify::ClassificationReport;
use pso_core::exact::{Poly, Rational, Scalar};
use pso_core::verify::{NumericEstimate, SuiteRow};
use pso_core::WeylElement;
use serde_json::{json, Value};

/// Always `"a/b"`, including integers.
pub fn rational(r: &Rational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

/// `{"variable", "terms": [{"varpow", "dpow", "re", "im"}]}`, terms sorted by
/// `(dpow, varpow)`.
pub fn operator<S: Scalar>(op: &WeylElement<S>) -> Value {
    let terms: Vec<Value> = op
        .terms()
        .iter()
        .map(|(m, c)| {
            let c = c.to_complex();
            json!({"varpow": m.varpow, "dpow": m.dpow, "re": rational(&c.re), "im": rational(&c.im)})
        })
        .collect();
    json!({"variable": op.var().name(), "terms": terms})
}

/// `{"variable", "coeffs": [{"re", "im"}]}`, ascending degree.
pub fn poly<S: Scalar>(p: &Poly<S>) -> Value {
    let coeffs: Vec<Value> = p
        .coeffs()
        .iter()
        .map(|c| {
            let c = c.to_complex();
            json!({"re": rational(&c.re), "im": rational(&c.im)})
        })
        .collect();
    json!({"variable": p.var().name(), "coeffs": coeffs, "text": p.to_string()})
}

pub fn estimate(e: &NumericEstimate) -> Value {
    json!({"value": e.value, "error_proxy": e.error_proxy, "scale": e.scale})
}

pub fn suite_rows(rows: &[SuiteRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| json!({"function": r.function, "estimate": estimate(&r.estimate)}))
            .collect(),
    )
}

pub fn classification(r: &ClassificationReport) -> Value {
    let branches: Vec<Value> = r
        .branches
        .iter()
        .map(|b| {
            json!({
                "j": b.j,
                "re": b.exponent.0,
                "im": b.exponent.1,
                "exact_re": b.exact_re.as_ref().map(rational),
                "exact_im": b.exact_im.as_ref().map(rational),
                "behaviour": b.behaviour.name(),
            })
        })
        .collect();
    json!({"m": r.m, "characterising": r.characterising, "branches": branches})
}
