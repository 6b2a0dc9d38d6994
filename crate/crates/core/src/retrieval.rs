//! Four-dimension evidence retrieval.
//!
//! The built-in query bank groups professional contextual queries by
//! analytical dimension; each sub-heading's phrase list is issued as one
//! query string. Per-dimension hits merge by max score per chunk, then
//! flatten across dimensions by max score again, so a passage relevant to
//! two dimensions ranks by its best use instead of double-counting.

use crate::gateway::Gateway;
use crate::index::{IndexError, SearchHit, VectorIndex};
use crate::segmenter::token_estimate;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("cannot retrieve from an empty index")]
    EmptyBundle,
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Gateway(#[from] crate::gateway::GatewayError),
    #[error("invalid query bank: {0}")]
    InvalidBank(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum DimensionName {
    GeneralFinancialPerformance,
    SpecializedFinancialMetrics,
    MarketSentimentRisk,
    MultiQueryIntegration,
}

impl DimensionName {
    pub const ALL: [DimensionName; 4] = [
        DimensionName::GeneralFinancialPerformance,
        DimensionName::SpecializedFinancialMetrics,
        DimensionName::MarketSentimentRisk,
        DimensionName::MultiQueryIntegration,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            DimensionName::GeneralFinancialPerformance => "General Financial Performance",
            DimensionName::SpecializedFinancialMetrics => "Specialized Financial Metrics",
            DimensionName::MarketSentimentRisk => "Market Sentiment & Risk",
            DimensionName::MultiQueryIntegration => "Multi-Query Integration",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryDimension {
    pub name: DimensionName,
    pub queries: Vec<String>,
}

/// The built-in professional query bank, one query per sub-heading group.
pub fn default_query_bank() -> Vec<QueryDimension> {
    fn q(strings: &[&str]) -> Vec<String> {
        strings.iter().map(|s| s.to_string()).collect()
    }
    vec![
        QueryDimension {
            name: DimensionName::GeneralFinancialPerformance,
            queries: q(&[
                "Financial Performance, Revenue, Earnings, Beat/Miss, Surprise, Financial Results",
                "Guidance, Outlook, Forecast, Expectations, Future Performance, Strategic Direction",
                "Growth Trends, Margin Expansion, Profitability, Cash Flow, Competitive Position",
                "Catalysts, Opportunities, Product Launches, Market Expansion, Strategic Initiatives",
            ]),
        },
        QueryDimension {
            name: DimensionName::SpecializedFinancialMetrics,
            queries: q(&[
                "Net Interest Margin (NIM), Loan Deposits, Credit Quality, Asset Quality",
                "Non-Performing Assets (NPAs), Charge-Offs, Provision Loan Losses, Problem Loans",
                "Return on Assets (ROA), Return on Equity (ROE), Efficiency Ratio, Capital Adequacy",
                "Regulatory Capital, Tier 1 Capital, Stress Testing, Compliance Requirements",
                "Deposit Growth, Loan Growth, Credit Demand, Funding Costs, Interest Rates",
            ]),
        },
        QueryDimension {
            name: DimensionName::MarketSentimentRisk,
            queries: q(&[
                "Management Confidence, Sentiment, Optimistic, Cautious, Positive/Negative Tone",
                "Risks, Challenges, Concerns, Headwinds, Uncertainties, Market Conditions",
                "Analyst Questions, Investor Concerns, Market Reception, Stock Movement Factors",
                "Risk Management, Credit Risk, Operational Risk, Market Risk, Liquidity Risk",
            ]),
        },
        QueryDimension {
            name: DimensionName::MultiQueryIntegration,
            queries: q(&[
                "Short-Term, Immediate, Near-Term, Weekly, Monthly, Quarterly Timeline Events",
                "Cross-Functional Analysis, Comparative Performance, Benchmarking Trends",
                "Integrated Reporting, Comprehensive Assessment, Multi-Dimensional Evaluation",
                "Temporal Correlation, Sequential Analysis, Longitudinal Performance Tracking",
            ]),
        },
    ]
}

/// Load a user-supplied bank (JSON list of {name, queries}) for
/// non-banking sectors; the same four dimensions must all be present.
pub fn load_query_bank(path: &std::path::Path) -> Result<Vec<QueryDimension>, RetrievalError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| RetrievalError::InvalidBank(e.to_string()))?;
    let bank: Vec<QueryDimension> =
        serde_json::from_str(&raw).map_err(|e| RetrievalError::InvalidBank(e.to_string()))?;
    validate_bank(&bank)?;
    Ok(bank)
}

pub fn validate_bank(bank: &[QueryDimension]) -> Result<(), RetrievalError> {
    for name in DimensionName::ALL {
        let dim = bank
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| RetrievalError::InvalidBank(format!("missing dimension {name:?}")))?;
        if dim.queries.is_empty() || dim.queries.iter().any(|q| q.trim().is_empty()) {
            return Err(RetrievalError::InvalidBank(format!(
                "dimension {name:?} has empty queries"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvidenceBundle {
    pub doc_id: String,
    pub per_dimension: BTreeMap<DimensionName, Vec<SearchHit>>,
    /// Deduplicated across dimensions; each chunk carries its maximum score.
    pub flattened: Vec<SearchHit>,
}

fn merge_by_max(hits: impl Iterator<Item = SearchHit>) -> Vec<SearchHit> {
    let mut best: BTreeMap<String, SearchHit> = BTreeMap::new();
    for h in hits {
        best.entry(h.chunk_id.clone())
            .and_modify(|e| {
                if h.score > e.score {
                    *e = h.clone();
                }
            })
            .or_insert(h);
    }
    let mut out: Vec<SearchHit> = best.into_values().collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.chunk_id.cmp(&b.chunk_id)));
    out
}

/// Run the bank against the index and assemble the evidence bundle.
pub fn retrieve_evidence(
    index: &VectorIndex,
    bank: &[QueryDimension],
    gateway: &Gateway,
    k_per_dimension: usize,
) -> Result<EvidenceBundle, RetrievalError> {
    validate_bank(bank)?;
    if index.is_empty() {
        return Err(RetrievalError::EmptyBundle);
    }
    let mut per_dimension = BTreeMap::new();
    let mut doc_id = String::new();
    // Fixed dimension order keeps the bundle deterministic.
    for name in DimensionName::ALL {
        let dim = bank.iter().find(|d| d.name == name).expect("validated");
        let vectors = gateway.embed(&dim.queries)?;
        let mut hits = Vec::new();
        for v in &vectors {
            hits.extend(index.search(v, k_per_dimension)?);
        }
        let mut merged = merge_by_max(hits.into_iter());
        merged.truncate(k_per_dimension);
        if let Some(h) = merged.first() {
            doc_id = h.chunk.doc_id.clone();
        }
        per_dimension.insert(name, merged);
    }
    let flattened = merge_by_max(per_dimension.values().flatten().cloned());
    Ok(EvidenceBundle {
        doc_id,
        per_dimension,
        flattened,
    })
}

/// Render the bundle as a sectioned evidence block under a token budget.
///
/// Chunks are included greedily in dimension-rank order and never split;
/// once the budget is exhausted a `[evidence truncated]` marker is emitted.
pub fn render_evidence(bundle: &EvidenceBundle, budget_tokens: usize) -> String {
    let mut out = String::new();
    let mut remaining = budget_tokens as isize;
    let mut truncated = false;
    for name in DimensionName::ALL {
        out.push_str(&format!("== {} ==\n", name.label()));
        if let Some(hits) = bundle.per_dimension.get(&name) {
            for h in hits {
                let cost = token_estimate(&h.chunk.text) as isize;
                if cost > remaining {
                    truncated = true;
                    continue;
                }
                remaining -= cost;
                out.push_str(&format!(
                    "[{}] ({}) {}\n",
                    h.chunk_id, h.chunk.speaker, h.chunk.text
                ));
            }
        }
        out.push('\n');
    }
    if truncated {
        out.push_str("[evidence truncated]\n");
    }
    out
}
