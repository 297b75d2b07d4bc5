//! Per-snapshot network metrics.
//!
//! [`compute`] evaluates one [`MetricId`] on a graph. [`Evaluator`] does the
//! same but caches shared intermediate results (largest component, BFS
//! aggregates, betweenness, triangle counts) across metrics of one graph.
//!
//! Distance-based metrics run on the largest connected component. Metrics
//! whose exact cost is superquadratic switch to a reproducible sampled
//! estimate above configurable node-count caps; the chosen mode is recorded
//! in the returned [`MetricValue`].

pub mod betweenness;
pub mod clustering;
pub mod community;
pub mod connectivity;
pub mod distance;
pub mod inequality;
pub mod linkpred;
pub mod powerlaw;
mod series;
pub mod spectral;
pub mod structural;
pub mod vitality;

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{sample_forestfire_nodes, DegreeDistribution, ForestFireConfig, TopologyGraph};
use crate::par;

pub use community::{label_propagation, Communities, LabelPropagation};
pub use linkpred::{avg_common_neighbor_centrality, avg_link_prediction, LinkIndex, PairSource};
pub use powerlaw::{fit_power_law, fit_power_law_points, PowerLawFit};
pub use series::{MetricCsvError, MetricSeries, SeriesRow};

/// Number of Lorenz-curve intervals reported by `lorenz_betweenness`
/// (the vector has one more entry).
pub const LORENZ_INTERVALS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("{metric} has no {mode} mode")]
    MetricUnsupportedInMode { metric: MetricId, mode: &'static str },
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),
    #[error("no eligible node pairs")]
    NoPairs,
    #[error("undefined: {0}")]
    Undefined(String),
}

impl MetricError {
    /// Short machine-readable name used in CSV error rows.
    pub fn code(&self) -> &'static str {
        match self {
            MetricError::EmptyGraph => "empty_graph",
            MetricError::MetricUnsupportedInMode { .. } => "unsupported_in_mode",
            MetricError::DegenerateDistribution(_) => "degenerate_distribution",
            MetricError::NoPairs => "no_pairs",
            MetricError::Undefined(_) => "undefined",
        }
    }
}

macro_rules! metric_ids {
    ($($variant:ident => $name:literal, $cost:ident;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum MetricId {
            $($variant,)*
        }

        impl MetricId {
            pub const ALL: &'static [MetricId] = &[$(MetricId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(MetricId::$variant => $name,)*
                }
            }

            pub fn cost(self) -> Cost {
                match self {
                    $(MetricId::$variant => Cost::$cost,)*
                }
            }
        }

        impl FromStr for MetricId {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(MetricId::$variant),)*
                    _ => Err(format!("unknown metric `{s}`")),
                }
            }
        }
    };
}

metric_ids! {
    NodeCount => "node_count", Cheap;
    EdgeCount => "edge_count", Cheap;
    ComponentCount => "component_count", Cheap;
    Density => "density", Cheap;
    Diameter => "diameter", Linear;
    AvgShortestPath => "avg_shortest_path", Linear;
    MeanDegree => "mean_degree", Cheap;
    DegreeAssortativity => "degree_assortativity", Cheap;
    BridgeCount => "bridge_count", Cheap;
    AvgNodeConnectivity => "avg_node_connectivity", Cubic;
    MinEdgeCoverSize => "min_edge_cover_size", Cheap;
    Transitivity => "transitivity", Cheap;
    AvgClustering => "avg_clustering", Cheap;
    GlobalEfficiency => "global_efficiency", Linear;
    InformationCentrality => "information_centrality", Cubic;
    MeanBetweenness => "mean_betweenness", Linear;
    CommunicabilityBetweenness => "communicability_betweenness", Cubic;
    CommonNeighborCentrality => "common_neighbor_centrality", Cheap;
    Constraint => "constraint", Cheap;
    EffectiveSize => "effective_size", Cheap;
    BurtsEffectiveSize => "burts_effective_size", Cheap;
    ClosenessVitality => "closeness_vitality", Cubic;
    AvgResourceAllocation => "avg_resource_allocation", Cheap;
    AvgJaccard => "avg_jaccard", Cheap;
    AvgPreferentialAttachment => "avg_preferential_attachment", Cheap;
    AvgPreferentialAttachmentNorm => "avg_preferential_attachment_norm", Cheap;
    FlpCommunityCount => "flp_community_count", Cheap;
    AlpCommunityCount => "alp_community_count", Cheap;
    GiniBetweenness => "gini_betweenness", Linear;
    LorenzBetweenness => "lorenz_betweenness", Linear;
    WienerIndex => "wiener_index", Linear;
    DegreeEntropy => "degree_entropy", Cheap;
    PowerlawAlpha => "powerlaw_alpha", Cheap;
    PowerlawR2 => "powerlaw_r2", Cheap;
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Asymptotic cost class, which decides the sampling cap that applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cost {
    /// At most `O(m log m)`-ish; always exact.
    Cheap,
    /// `O(n·m)` all-sources BFS work.
    Linear,
    /// Dense linear algebra or all-pairs max-flow.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingPolicy {
    /// Exact up to the caps, sampled above them.
    #[default]
    Auto,
    Exact,
    /// Sampled regardless of size; metrics without a sampled variant fail
    /// with [`MetricError::MetricUnsupportedInMode`].
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    pub seed: u64,
    /// Sources, pairs or subsample nodes drawn in sampled mode.
    pub sample_size: usize,
    /// Largest component size evaluated exactly for `O(n·m)` metrics.
    pub linear_cap: usize,
    /// Node count evaluated exactly for cubic metrics.
    pub cubic_cap: usize,
    /// Cap (and subsample size) for communicability betweenness, whose exact
    /// cost is `O(n⁴)`.
    pub communicability_cap: usize,
    pub sampling: SamplingPolicy,
    pub ccpa_alpha: f64,
    pub pair_source: PairSource,
    /// Burn probability of the subsampler used by cubic metrics.
    pub forest_fire_p: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            seed: 0,
            sample_size: 500,
            linear_cap: 2000,
            cubic_cap: 500,
            communicability_cap: 100,
            sampling: SamplingPolicy::Auto,
            ccpa_alpha: 0.8,
            pair_source: PairSource::Edges,
            forest_fire_p: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Value {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Value::Scalar(x) => Some(*x),
            Value::Vector(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(x) => write!(f, "{x}"),
            Value::Vector(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled { n_samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub metric: MetricId,
    pub value: Value,
    pub mode: Mode,
}

impl MetricValue {
    pub fn scalar(&self) -> Option<f64> {
        self.value.as_scalar()
    }
}

/// Computes a single metric.
pub fn compute(g: &TopologyGraph, metric: MetricId, params: &MetricParams) -> Result<MetricValue, MetricError> {
    Evaluator::new(g, *params).compute(metric)
}

/// Metric evaluation over one graph with cached intermediates.
pub struct Evaluator<'g> {
    g: &'g TopologyGraph,
    params: MetricParams,
    lcc: OnceCell<TopologyGraph>,
    sources: OnceCell<(Vec<u32>, Mode)>,
    distances: OnceCell<distance::DistanceSummary>,
    betweenness: OnceCell<Vec<f64>>,
    triangles: OnceCell<Vec<u64>>,
    degrees: OnceCell<DegreeDistribution>,
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g TopologyGraph, params: MetricParams) -> Self {
        Evaluator {
            g,
            params,
            lcc: OnceCell::new(),
            sources: OnceCell::new(),
            distances: OnceCell::new(),
            betweenness: OnceCell::new(),
            triangles: OnceCell::new(),
            degrees: OnceCell::new(),
        }
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    fn lcc(&self) -> &TopologyGraph {
        self.lcc.get_or_init(|| self.g.largest_component())
    }

    fn sampled_mode(&self, n_samples: usize) -> Mode {
        Mode::Sampled { n_samples, seed: self.params.seed }
    }

    /// Whether a metric of this cost on `n` nodes (with the given cap) runs
    /// sampled.
    fn use_sampling(&self, metric: MetricId, n: usize, cap: usize) -> Result<bool, MetricError> {
        match (self.params.sampling, metric.cost()) {
            (SamplingPolicy::Sampled, Cost::Cheap) => {
                Err(MetricError::MetricUnsupportedInMode { metric, mode: "sampled" })
            }
            (_, Cost::Cheap) | (SamplingPolicy::Exact, _) => Ok(false),
            (SamplingPolicy::Sampled, _) => Ok(true),
            (SamplingPolicy::Auto, _) => Ok(n > cap),
        }
    }

    /// BFS sources in the largest component: all nodes, or a uniform sample.
    fn sources(&self, metric: MetricId) -> Result<&(Vec<u32>, Mode), MetricError> {
        if let Some(s) = self.sources.get() {
            return Ok(s);
        }
        let n = self.lcc().node_count();
        let chosen = if self.use_sampling(metric, n, self.params.linear_cap)? {
            let k = self.params.sample_size.clamp(1, n);
            let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
            let mut s: Vec<u32> = index::sample(&mut rng, n, k).into_iter().map(|i| i as u32).collect();
            s.sort_unstable();
            (s, self.sampled_mode(k))
        } else {
            ((0..n as u32).collect(), Mode::Exact)
        };
        Ok(self.sources.get_or_init(|| chosen))
    }

    fn distances(&self, metric: MetricId) -> Result<(distance::DistanceSummary, Mode), MetricError> {
        let (sources, mode) = self.sources(metric)?;
        let d = self
            .distances
            .get_or_init(|| distance::distance_summary(self.lcc(), sources));
        Ok((*d, *mode))
    }

    fn betweenness(&self, metric: MetricId) -> Result<(&[f64], Mode), MetricError> {
        let (sources, mode) = self.sources(metric)?;
        let b = self
            .betweenness
            .get_or_init(|| betweenness::betweenness(self.lcc(), sources));
        Ok((b, *mode))
    }

    fn triangles(&self) -> &[u64] {
        self.triangles.get_or_init(|| clustering::triangles(self.g))
    }

    fn degrees(&self) -> &DegreeDistribution {
        self.degrees.get_or_init(|| DegreeDistribution::from_graph(self.g))
    }

    /// The largest component, or a connected ForestFire subsample of it with
    /// `size` nodes when sampling applies.
    fn cubic_subject(&self, metric: MetricId, cap: usize, size: usize) -> Result<(TopologyGraph, Mode), MetricError> {
        let lcc = self.lcc();
        let n = lcc.node_count();
        if !self.use_sampling(metric, n, cap)? {
            return Ok((lcc.clone(), Mode::Exact));
        }
        let target = size.clamp(1, n);
        let cfg = ForestFireConfig {
            target_size: target,
            count: 1,
            p_forward: self.params.forest_fire_p,
            seed: self.params.seed,
        };
        let nodes = sample_forestfire_nodes(lcc, &cfg)
            .map_err(|e| MetricError::Undefined(e.to_string()))?
            .pop()
            .expect("one sample requested");
        Ok((lcc.induced(&nodes), self.sampled_mode(target)))
    }

    fn exact(&self, metric: MetricId, x: f64) -> MetricValue {
        MetricValue { metric, value: Value::Scalar(x), mode: Mode::Exact }
    }

    /// Full Lorenz curve of betweenness over the largest component (`n + 1`
    /// points), sharing the cache used by the betweenness metrics.
    pub fn betweenness_lorenz(&self) -> Result<(Vec<(f64, f64)>, Mode), MetricError> {
        if self.g.node_count() == 0 {
            return Err(MetricError::EmptyGraph);
        }
        let (b, mode) = self.betweenness(MetricId::LorenzBetweenness)?;
        let curve = inequality::lorenz_curve(b).ok_or_else(|| MetricError::Undefined("invalid betweenness".into()))?;
        Ok((curve, mode))
    }

    pub fn compute(&self, metric: MetricId) -> Result<MetricValue, MetricError> {
        use MetricId::*;
        let g = self.g;
        let n = g.node_count();
        if n == 0 {
            return Err(MetricError::EmptyGraph);
        }
        let m = g.edge_count();
        // Cheap metrics are always exact; this rejects an explicit sampled policy.
        self.use_sampling(metric, n, usize::MAX)?;
        let scalar = |x: f64, mode: Mode| Ok(MetricValue { metric, value: Value::Scalar(x), mode });
        match metric {
            NodeCount => Ok(self.exact(metric, n as f64)),
            EdgeCount => Ok(self.exact(metric, m as f64)),
            ComponentCount => Ok(self.exact(metric, g.component_count() as f64)),
            Density => {
                let d = if n < 2 { 0.0 } else { 2.0 * m as f64 / (n as f64 * (n - 1) as f64) };
                Ok(self.exact(metric, d))
            }
            MeanDegree => Ok(self.exact(metric, 2.0 * m as f64 / n as f64)),
            DegreeAssortativity => degree_assortativity(g).map(|r| self.exact(metric, r)),
            Diameter => {
                let (d, mode) = self.distances(metric)?;
                scalar(f64::from(d.max_distance), mode)
            }
            AvgShortestPath => {
                let (d, mode) = self.distances(metric)?;
                if d.ordered_pairs == 0 {
                    return Err(MetricError::Undefined("largest component has one node".into()));
                }
                scalar(d.distance_sum as f64 / d.ordered_pairs as f64, mode)
            }
            GlobalEfficiency => {
                let (d, mode) = self.distances(metric)?;
                let e = if d.ordered_pairs == 0 { 0.0 } else { d.inverse_sum / d.ordered_pairs as f64 };
                scalar(e, mode)
            }
            WienerIndex => {
                let (d, mode) = self.distances(metric)?;
                let w = match mode {
                    Mode::Exact => (d.distance_sum / 2) as f64,
                    Mode::Sampled { .. } => {
                        let k = self.lcc().node_count() as f64;
                        if d.ordered_pairs == 0 {
                            0.0
                        } else {
                            d.distance_sum as f64 / d.ordered_pairs as f64 * k * (k - 1.0) / 2.0
                        }
                    }
                };
                scalar(w, mode)
            }
            MeanBetweenness => {
                let (b, mode) = self.betweenness(metric)?;
                scalar(b.iter().sum::<f64>() / b.len() as f64, mode)
            }
            GiniBetweenness => {
                let (b, mode) = self.betweenness(metric)?;
                let gi = inequality::gini(b).ok_or_else(|| MetricError::Undefined("invalid betweenness".into()))?;
                scalar(gi, mode)
            }
            LorenzBetweenness => {
                let (b, mode) = self.betweenness(metric)?;
                let curve = inequality::lorenz_curve(b)
                    .ok_or_else(|| MetricError::Undefined("invalid betweenness".into()))?;
                Ok(MetricValue {
                    metric,
                    value: Value::Vector(inequality::lorenz_resample(&curve, LORENZ_INTERVALS)),
                    mode,
                })
            }
            BridgeCount => Ok(self.exact(metric, connectivity::bridge_count(g) as f64)),
            AvgNodeConnectivity => self.avg_node_connectivity(),
            MinEdgeCoverSize => {
                if g.nodes().any(|v| g.degree(v) == 0) {
                    return Err(MetricError::Undefined("graph has isolated nodes".into()));
                }
                Ok(self.exact(metric, (n - connectivity::maximum_matching(g)) as f64))
            }
            Transitivity => Ok(self.exact(metric, clustering::transitivity(g, self.triangles()))),
            AvgClustering => {
                let c = clustering::local_clustering(g, self.triangles());
                Ok(self.exact(metric, c.iter().sum::<f64>() / n as f64))
            }
            InformationCentrality => {
                let p = self.params;
                let (sub, mode) = self.cubic_subject(metric, p.cubic_cap, p.sample_size)?;
                let ic = spectral::information_centrality(&sub)
                    .ok_or_else(|| MetricError::Undefined("needs a connected graph with 2+ nodes".into()))?;
                scalar(ic.iter().sum::<f64>() / ic.len() as f64, mode)
            }
            CommunicabilityBetweenness => {
                let cap = self.params.communicability_cap;
                let (sub, mode) = self.cubic_subject(metric, cap, cap)?;
                let cb = spectral::communicability_betweenness(&sub)
                    .ok_or_else(|| MetricError::Undefined("needs a connected graph with 3+ nodes".into()))?;
                scalar(cb.iter().sum::<f64>() / cb.len() as f64, mode)
            }
            ClosenessVitality => {
                let p = self.params;
                let (sub, mode) = self.cubic_subject(metric, p.cubic_cap, p.sample_size)?;
                let cv = vitality::closeness_vitality(&sub);
                scalar(cv.iter().sum::<f64>() / cv.len() as f64, mode)
            }
            CommonNeighborCentrality => {
                let v = avg_common_neighbor_centrality(g, self.params.ccpa_alpha, self.params.pair_source)?;
                scalar(v, self.pair_mode())
            }
            Constraint => self.mean_of(metric, structural::constraint(g)),
            EffectiveSize => self.mean_of(metric, structural::effective_size(g, self.triangles())),
            BurtsEffectiveSize => self.mean_of(metric, structural::burts_effective_size(g, self.triangles())),
            AvgResourceAllocation => self.link(LinkIndex::ResourceAllocation, metric, 1.0),
            AvgJaccard => self.link(LinkIndex::Jaccard, metric, 1.0),
            AvgPreferentialAttachment => self.link(LinkIndex::PreferentialAttachment, metric, 1.0),
            AvgPreferentialAttachmentNorm => {
                let mean_degree = 2.0 * m as f64 / n as f64;
                if mean_degree == 0.0 {
                    return Err(MetricError::NoPairs);
                }
                self.link(LinkIndex::PreferentialAttachment, metric, mean_degree)
            }
            FlpCommunityCount => {
                let c = label_propagation(g, LabelPropagation::Fast, self.params.seed);
                Ok(self.exact(metric, c.count as f64))
            }
            AlpCommunityCount => {
                let c = label_propagation(g, LabelPropagation::Async, self.params.seed);
                Ok(self.exact(metric, c.count as f64))
            }
            DegreeEntropy => Ok(self.exact(metric, degree_entropy(self.degrees()))),
            PowerlawAlpha => fit_power_law(self.degrees()).map(|f| self.exact(metric, f.alpha)),
            PowerlawR2 => fit_power_law(self.degrees()).map(|f| self.exact(metric, f.r_squared)),
        }
    }

    fn pair_mode(&self) -> Mode {
        match self.params.pair_source {
            PairSource::Edges => Mode::Exact,
            PairSource::SampledNonEdges { n, seed } => Mode::Sampled { n_samples: n, seed },
        }
    }

    fn link(&self, index: LinkIndex, metric: MetricId, divisor: f64) -> Result<MetricValue, MetricError> {
        let v = avg_link_prediction(self.g, index, self.params.pair_source)?;
        Ok(MetricValue { metric, value: Value::Scalar(v / divisor), mode: self.pair_mode() })
    }

    fn mean_of(&self, metric: MetricId, values: Vec<Option<f64>>) -> Result<MetricValue, MetricError> {
        structural::mean_defined(&values)
            .map(|x| self.exact(metric, x))
            .ok_or_else(|| MetricError::Undefined("no node with positive degree".into()))
    }

    /// Mean local node connectivity over all unordered pairs, or over
    /// uniformly drawn pairs above the cap.
    fn avg_node_connectivity(&self) -> Result<MetricValue, MetricError> {
        let metric = MetricId::AvgNodeConnectivity;
        let g = self.g;
        let n = g.node_count();
        if n < 2 {
            return Err(MetricError::NoPairs);
        }
        let (pairs, mode): (Vec<(u32, u32)>, Mode) = if self.use_sampling(metric, n, self.params.cubic_cap)? {
            let k = self.params.sample_size.max(1);
            let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
            let pairs = (0..k)
                .map(|_| {
                    let u = rng.gen_range(0..n as u32);
                    let mut v = rng.gen_range(0..n as u32 - 1);
                    if v >= u {
                        v += 1;
                    }
                    (u, v)
                })
                .collect();
            (pairs, self.sampled_mode(k))
        } else {
            let pairs = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v))).collect();
            (pairs, Mode::Exact)
        };
        let (label, _) = g.component_labels();
        let total = par::map_reduce_chunks(
            pairs.len(),
            || 0u64,
            |mut acc, r| {
                let mut net = connectivity::SplitFlowNetwork::new(g);
                for &(u, v) in &pairs[r] {
                    if label[u as usize] == label[v as usize] {
                        let limit = g.degree(u).min(g.degree(v));
                        acc += net.local_connectivity(u, v, limit) as u64;
                    }
                }
                acc
            },
            |a, b| a + b,
        );
        Ok(MetricValue {
            metric,
            value: Value::Scalar(total as f64 / pairs.len() as f64),
            mode,
        })
    }
}

/// Pearson correlation of the degrees at either end of each edge.
pub fn degree_assortativity(g: &TopologyGraph) -> Result<f64, MetricError> {
    let m = g.edge_count();
    if m == 0 {
        return Err(MetricError::Undefined("graph has no edges".into()));
    }
    let pairs: Vec<(f64, f64)> = g
        .edges()
        .map(|(u, v)| (g.degree(u) as f64, g.degree(v) as f64))
        .collect();
    // Both orientations: the two marginals coincide.
    let count = 2.0 * m as f64;
    let mean = pairs.iter().map(|&(a, b)| a + b).sum::<f64>() / count;
    let (mut cov, mut var) = (0.0, 0.0);
    for &(a, b) in &pairs {
        let (da, db) = (a - mean, b - mean);
        cov += 2.0 * da * db;
        var += da * da + db * db;
    }
    if var == 0.0 {
        return Err(MetricError::Undefined("all edge endpoints have equal degree".into()));
    }
    Ok(cov / var)
}

/// Shannon entropy (bits) of the degree frequency distribution.
pub fn degree_entropy(dd: &DegreeDistribution) -> f64 {
    let n = dd.len() as f64;
    let h: f64 = dd
        .frequencies()
        .into_iter()
        .map(|(_, c)| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}
