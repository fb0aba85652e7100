use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use super::gauss_legendre::GaussLegendre;
use super::{Estimate, QuadError, QuadSpec};

/// Rule value on one interval plus the propagated error of nested integrals.
#[derive(Debug, Clone, Copy)]
struct RuleValue {
    value: f64,
    inner_err: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    left: RuleValue,
    right: RuleValue,
    err: f64,
}

impl Panel {
    fn value(&self) -> f64 {
        self.left.value + self.right.value
    }

    fn inner_err(&self) -> f64 {
        self.left.inner_err + self.right.inner_err
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the pop order is
    // fully determined by the inputs.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

struct Integrator<'r, F> {
    rule: &'r GaussLegendre,
    f: F,
    evaluations: usize,
}

impl<F> Integrator<'_, F>
where
    F: FnMut(f64) -> Result<(f64, f64), QuadError>,
{
    fn apply(&mut self, a: f64, b: f64) -> Result<RuleValue, QuadError> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut value = 0.0;
        let mut inner_err = 0.0;
        for (x, w) in self.rule.nodes().iter().zip(self.rule.weights()) {
            let at = c + h * x;
            let (v, e) = (self.f)(at)?;
            if !v.is_finite() {
                return Err(QuadError::NonFinite { x: at });
            }
            value += w * v;
            inner_err += w * e;
        }
        self.evaluations += self.rule.nodes().len();
        Ok(RuleValue {
            value: value * h,
            inner_err: inner_err * h.abs(),
        })
    }

    fn panel(&mut self, a: f64, b: f64, whole: RuleValue) -> Result<Panel, QuadError> {
        let m = 0.5 * (a + b);
        let left = self.apply(a, m)?;
        let right = self.apply(m, b)?;
        let err = (whole.value - (left.value + right.value)).abs();
        Ok(Panel {
            a,
            b,
            left,
            right,
            err,
        })
    }
}

/// Core adaptive loop. Each panel carries its two half-panel rule values and
/// the discrepancy with the whole-panel rule as its error. The worst panel
/// is bisected until the summed error meets the spec.
fn adaptive<F>(f: F, breaks: &[f64], spec: &QuadSpec) -> Result<Estimate, QuadError>
where
    F: FnMut(f64) -> Result<(f64, f64), QuadError>,
{
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(QuadError::InvalidSpec(
            "need at least two break points".into(),
        ));
    }
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(QuadError::InvalidInterval { lo: w[0], hi: w[1] });
        }
    }

    let rule = GaussLegendre::cached(spec.nodes_per_panel);
    let mut it = Integrator {
        rule: &rule,
        f,
        evaluations: 0,
    };

    let mut heap = BinaryHeap::with_capacity(breaks.len());
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_inner = 0.0;
    for w in breaks.windows(2) {
        let whole = it.apply(w[0], w[1])?;
        let p = it.panel(w[0], w[1], whole)?;
        total += p.value();
        total_err += p.err;
        total_inner += p.inner_err();
        heap.push(p);
    }

    loop {
        if total_err <= spec.target(total) {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            let best = finish(heap, it.evaluations);
            return Err(QuadError::NonConvergence {
                best,
                budget: spec.max_subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        let l = it.panel(worst.a, m, worst.left)?;
        let r = it.panel(m, worst.b, worst.right)?;
        total += l.value() + r.value() - worst.value();
        total_err += l.err + r.err - worst.err;
        total_inner += l.inner_err() + r.inner_err() - worst.inner_err();
        heap.push(l);
        heap.push(r);
        // Guard against drift in the running sums.
        total_err = total_err.max(0.0);
        total_inner = total_inner.max(0.0);
    }

    Ok(finish(heap, it.evaluations))
}

/// Sum panels in interval order so the result is independent of heap layout.
fn finish(heap: BinaryHeap<Panel>, evaluations: usize) -> Estimate {
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().map(Panel::value).sum();
    let error_estimate = panels.iter().map(|p| p.err + p.inner_err()).sum();
    Estimate {
        value,
        error_estimate,
        evaluations,
    }
}

/// Integrate `f` over `[lo, hi]`.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<Estimate, QuadError> {
    if !(lo < hi) {
        return Err(QuadError::InvalidInterval { lo, hi });
    }
    adaptive(|x| Ok((f(x), 0.0)), &[lo, hi], spec)
}

/// Integrate over `[breaks[0], breaks[last]]` with the given points as the
/// initial panel edges. Use this for known kinks or oscillation scales.
pub fn integrate_1d_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<Estimate, QuadError> {
    adaptive(|x| Ok((f(x), 0.0)), breaks, spec)
}

/// Outer integral whose integrand is itself an [`Estimate`]. The inner
/// errors are accumulated into the returned error estimate.
pub fn integrate_nested<F>(mut f: F, breaks: &[f64], spec: &QuadSpec) -> Result<Estimate, QuadError>
where
    F: FnMut(f64) -> Result<Estimate, QuadError>,
{
    adaptive(
        |x| {
            let e = f(x)?;
            Ok((e.value, e.error_estimate))
        },
        breaks,
        spec,
    )
}

/// `(1/4pi) * integral over two unit vectors` of `f(theta1, theta2, dphi)`,
/// where `dphi` is the azimuth difference. The common azimuth is integrated
/// out analytically (factor 2 pi).
pub fn integrate_sphere_pair<F>(f: F, spec: &QuadSpec) -> Result<Estimate, QuadError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let inner = QuadSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    let innermost = QuadSpec {
        rel_tol: inner.rel_tol * 0.1,
        abs_tol: inner.abs_tol * 0.1,
        ..inner
    };
    let outer = integrate_nested(
        |t1| {
            let mid = integrate_nested(
                |t2| {
                    let e = integrate_1d(|dphi| f(t1, t2, dphi), 0.0, 2.0 * PI, &innermost)?;
                    Ok(e.scaled(t2.sin()))
                },
                &[0.0, PI],
                &inner,
            )?;
            Ok(mid.scaled(t1.sin()))
        },
        &[0.0, PI],
        spec,
    )?;
    Ok(outer.scaled(2.0 * PI / (4.0 * PI)))
}
