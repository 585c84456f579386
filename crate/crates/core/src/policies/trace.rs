use serde::{Deserialize, Serialize};

/// Branch taken when the vehicle reaches a customer on the tour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepCase {
    /// Normal goods suffice.
    #[serde(rename = "1")]
    Deliver,
    /// Backup goods cover the shortfall; one additional depot visit.
    #[serde(rename = "2")]
    Backup,
    /// Two additional depot visits.
    #[serde(rename = "3.1")]
    RoundTrip,
    /// Demand recorded and served later by a dedicated tour.
    #[serde(rename = "3.2")]
    Skip,
    /// Splittable delivery with the given number of refills.
    #[serde(rename = "split")]
    Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub customer: usize,
    pub case: StepCase,
    /// Normal goods on arrival.
    pub load_before: f64,
    /// Normal goods when leaving towards the next customer.
    pub load_after: f64,
    /// Additional depot visits caused by this customer.
    pub visits: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyTrace {
    pub arm: String,
    pub initial_load: Option<f64>,
    pub delta: f64,
    pub steps: Vec<TraceStep>,
    /// Customers served by dedicated tours after the traversal.
    pub skipped: Vec<usize>,
    /// Index of the mixture arm that was run.
    pub coin: Option<usize>,
    pub notes: Vec<String>,
}

impl PolicyTrace {
    pub fn new(arm: impl Into<String>) -> Self {
        PolicyTrace { arm: arm.into(), ..Default::default() }
    }

    pub fn additional_visits(&self) -> usize {
        self.steps.iter().map(|s| s.visits).sum::<usize>() + self.skipped.len()
    }

    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("trace step serializes"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
