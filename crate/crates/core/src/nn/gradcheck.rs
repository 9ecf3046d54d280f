use super::ParamSet;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Worst entry of one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCheck {
    pub name: String,
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub tol: f64,
    pub max_rel_error: f64,
    pub params: Vec<ParamCheck>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tol
    }

    pub fn failures(&self) -> impl Iterator<Item = &ParamCheck> {
        self.params.iter().filter(move |p| p.max_rel_error.is_nan() || p.max_rel_error > self.tol)
    }
}

/// Compares the gradients stored in `params` against central differences of
/// `objective`, entry by entry.
///
/// `objective` receives the perturbed parameter set and the name of the
/// parameter being perturbed, which lets callers check parameters whose
/// analytic gradient is taken of a different scalar (e.g. reversed through a
/// gradient-reversal layer). The error per entry is
/// `|analytic - numeric| / max(1, |numeric|)`.
pub fn grad_check<F>(params: &ParamSet, tol: f64, mut objective: F) -> GradCheckReport
where
    F: FnMut(&ParamSet, &str) -> f64,
{
    let mut probe = params.clone();
    let mut checks = Vec::with_capacity(params.len());
    for slot in 0..params.values.len() {
        let name = params
            .names()
            .nth(slot)
            .expect("slot within parameter count")
            .to_string();
        let mut worst = ParamCheck {
            name: name.clone(),
            max_rel_error: 0.0,
            worst_index: 0,
            analytic: 0.0,
            numeric: 0.0,
        };
        for e in 0..params.values[slot].len() {
            let orig = params.values[slot].data()[e];
            probe.values[slot].data_mut()[e] = orig + FD_STEP;
            let plus = objective(&probe, &name);
            probe.values[slot].data_mut()[e] = orig - FD_STEP;
            let minus = objective(&probe, &name);
            probe.values[slot].data_mut()[e] = orig;

            let numeric = (plus - minus) / (2.0 * FD_STEP);
            let analytic = params.grads[slot].data()[e];
            let err = (analytic - numeric).abs() / numeric.abs().max(1.0);
            // NaN compares false; record it so the check fails.
            if err > worst.max_rel_error || err.is_nan() {
                worst.max_rel_error = err;
                worst.worst_index = e;
                worst.analytic = analytic;
                worst.numeric = numeric;
            }
        }
        checks.push(worst);
    }
    let max_rel_error = checks
        .iter()
        .map(|c| c.max_rel_error)
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    GradCheckReport {
        tol,
        max_rel_error,
        params: checks,
    }
}
