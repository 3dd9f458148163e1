//! Byte-stable result serialization.
//!
//! Every float is rendered with 17 significant digits, enough to survive a
//! parse round trip bit for bit, and injected into JSON as a raw token so
//! the emitted bytes depend only on the values, never on serializer
//! internals. Reports are plain structs with fixed field order; feeding
//! the same results twice yields identical bytes, which the comparison
//! pipeline relies on.

use serde::Serialize;
use serde_json::value::RawValue;

use crate::hardness::{GeneralCostAnswer, GeneralCostInstance, ReductionCheck};
use crate::model::StepRewardScheme;
use crate::schemes::{LinearSolution, PropEquilibrium};
use crate::solver::{AirsSolution, KktReport};

/// 17 significant digits: exact decimal round trip for every finite f64.
pub fn f17_plain(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        v.to_string()
    }
}

fn f17(v: f64) -> Box<RawValue> {
    let tok = if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        format!("\"{}\"", v)
    };
    RawValue::from_string(tok).expect("valid JSON token")
}

fn f17_vec(vs: &[f64]) -> Vec<Box<RawValue>> {
    vs.iter().map(|v| f17(*v)).collect()
}

pub fn to_json<T: Serialize>(t: &T) -> String {
    let mut s = serde_json::to_string_pretty(t).expect("report structs always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct SchemeReport {
    pub breakpoints: Vec<Box<RawValue>>,
    pub rewards: Vec<Box<RawValue>>,
}

impl SchemeReport {
    pub fn new(scheme: &StepRewardScheme) -> Self {
        SchemeReport {
            breakpoints: f17_vec(scheme.breakpoints()),
            rewards: f17_vec(scheme.rewards()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct KktResidualReport {
    pub stationarity: Box<RawValue>,
    pub budget_slack: Box<RawValue>,
    pub complementary_order: Box<RawValue>,
    pub primal_budget: Box<RawValue>,
    pub primal_order: Box<RawValue>,
    pub dual_negativity: Box<RawValue>,
    pub marginal_gap: Box<RawValue>,
    pub max_violation: Box<RawValue>,
}

impl KktResidualReport {
    pub fn new(kkt: &KktReport) -> Self {
        KktResidualReport {
            stationarity: f17(kkt.stationarity),
            budget_slack: f17(kkt.budget_slack),
            complementary_order: f17(kkt.complementary_order),
            primal_budget: f17(kkt.primal_budget),
            primal_order: f17(kkt.primal_order),
            dual_negativity: f17(kkt.dual_negativity),
            marginal_gap: f17(kkt.marginal_gap),
            max_violation: f17(kkt.max_violation()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AirsReport {
    pub gross: Box<RawValue>,
    pub spend: Box<RawValue>,
    pub lambda: Box<RawValue>,
    pub q: usize,
    pub iterations: usize,
    pub actions: Vec<Box<RawValue>>,
    pub scheme: SchemeReport,
    pub kkt: KktResidualReport,
}

impl AirsReport {
    pub fn new(sol: &AirsSolution) -> Self {
        AirsReport {
            gross: f17(sol.gross),
            spend: f17(sol.spend),
            lambda: f17(sol.lambda),
            q: sol.q,
            iterations: sol.iterations,
            actions: f17_vec(&sol.actions),
            scheme: SchemeReport::new(&sol.scheme),
            kkt: KktResidualReport::new(&sol.kkt),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LinearReport {
    pub price: Box<RawValue>,
    pub gross: Box<RawValue>,
    pub spend: Box<RawValue>,
    pub iterations: usize,
    pub actions: Vec<Box<RawValue>>,
}

impl LinearReport {
    pub fn new(sol: &LinearSolution) -> Self {
        LinearReport {
            price: f17(sol.price),
            gross: f17(sol.gross),
            spend: f17(sol.spend),
            iterations: sol.iterations,
            actions: f17_vec(&sol.actions),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PropReport {
    pub gross: Box<RawValue>,
    pub spend: Box<RawValue>,
    pub rounds: usize,
    pub types: Vec<Box<RawValue>>,
    pub actions: Vec<Box<RawValue>>,
    pub foc_residuals: Vec<Box<RawValue>>,
}

impl PropReport {
    pub fn new(eq: &PropEquilibrium) -> Self {
        PropReport {
            gross: f17(eq.gross),
            spend: f17(eq.spend),
            rounds: eq.rounds,
            types: f17_vec(&eq.types),
            actions: f17_vec(&eq.actions),
            foc_residuals: f17_vec(&eq.foc_residuals),
        }
    }
}

/// Result of a seeded random-deviation search: the best utility gain any
/// producer found off its assigned action (at an optimum, noise level).
#[derive(Debug, Serialize)]
pub struct DeviationCheck {
    pub seed: u64,
    pub samples: usize,
    pub max_gain: Box<RawValue>,
}

impl DeviationCheck {
    pub fn new(seed: u64, samples: usize, max_gain: f64) -> Self {
        DeviationCheck { seed, samples, max_gain: f17(max_gain) }
    }
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub airs: AirsReport,
    pub linear: LinearReport,
    pub linear_to_airs: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proportional: Option<PropReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proportional_to_airs: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_check: Option<DeviationCheck>,
}

impl CompareReport {
    pub fn new(
        airs: &AirsSolution,
        linear: &LinearSolution,
        proportional: Option<&PropEquilibrium>,
    ) -> Self {
        CompareReport {
            airs: AirsReport::new(airs),
            linear: LinearReport::new(linear),
            linear_to_airs: f17(linear.gross / airs.gross),
            proportional: proportional.map(PropReport::new),
            proportional_to_airs: proportional.map(|p| f17(p.gross / airs.gross)),
            deviation_check: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Serialize)]
pub struct ReductionReport {
    pub types: Vec<u64>,
    pub budget: u64,
    pub target_gross: u64,
    pub subset_sum: bool,
    pub general_cost: bool,
    pub agree: bool,
    pub best_gross: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SchemeReport>,
}

impl ReductionReport {
    pub fn new(
        inst: &GeneralCostInstance,
        check: &ReductionCheck,
        answer: &GeneralCostAnswer,
    ) -> Self {
        ReductionReport {
            types: inst.types.clone(),
            budget: inst.budget,
            target_gross: inst.target_gross,
            subset_sum: check.subset_sum,
            general_cost: check.general_cost,
            agree: check.subset_sum == check.general_cost,
            best_gross: answer.best_gross,
            witness: answer.witness.as_ref().map(SchemeReport::new),
        }
    }
}

/// CSV of a step scheme, one rung per row.
pub fn scheme_csv(scheme: &StepRewardScheme) -> String {
    let mut out = String::from("breakpoint,reward\n");
    for (b, r) in scheme.breakpoints().iter().zip(scheme.rewards()) {
        out.push_str(&f17_plain(*b));
        out.push(',');
        out.push_str(&f17_plain(*r));
        out.push('\n');
    }
    out
}

/// CSV of a comparison, one scheme per row.
pub fn compare_csv(
    airs: &AirsSolution,
    linear: &LinearSolution,
    proportional: Option<&PropEquilibrium>,
) -> String {
    let mut out = String::from("scheme,gross,spend,gross_to_airs\n");
    let mut row = |name: &str, gross: f64, spend: f64| {
        out.push_str(name);
        out.push(',');
        out.push_str(&f17_plain(gross));
        out.push(',');
        out.push_str(&f17_plain(spend));
        out.push(',');
        out.push_str(&f17_plain(gross / airs.gross));
        out.push('\n');
    };
    row("airs", airs.gross, airs.spend);
    row("linear", linear.gross, linear.spend);
    if let Some(p) = proportional {
        row("proportional", p.gross, p.spend);
    }
    out
}
