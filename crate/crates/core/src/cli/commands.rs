use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::{read_manifest, ManifestEntry};
use super::CliError;
use crate::balancer::{group_balance, imbalance, Assignment, WorkItem};
use crate::geometry::{flops_cost, plan_image, CostModel, ImagePlan};
use crate::grounding::{emit_region, normalize_box, normalize_point, PixelBox, Region};
use crate::loadsim::{simulate_io, simulate_io_assigned, IoReport, Topology};
use crate::packer::{pack_ffd, PackItem, PackPlan};
use crate::scaling::{fit_line, predict_metric, LineFit, MetricFit, PowerLawFit};
use crate::videoplan::{level_to_dims, plan_video, TaskKind, VideoPlan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlanEntry {
    Image {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin_rank: Option<usize>,
        plan: ImagePlan,
        /// Grounding tokens for annotated boxes and points.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        regions: Vec<String>,
    },
    Video {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin_rank: Option<usize>,
        task_kind: TaskKind,
        fps: f64,
        duration: f64,
        aspect: f64,
        plan: VideoPlan,
        /// Aligned geometry shared by every selected frame.
        frame: ImagePlan,
        timestamps: Vec<String>,
    },
}

/// One encoder input: a whole image or one video frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub id: String,
    pub origin_rank: Option<usize>,
    pub geometry: ImagePlan,
}

impl PlanEntry {
    pub fn units(&self) -> Vec<Unit> {
        match self {
            PlanEntry::Image {
                id,
                origin_rank,
                plan,
                ..
            } => vec![Unit {
                id: id.clone(),
                origin_rank: *origin_rank,
                geometry: *plan,
            }],
            PlanEntry::Video {
                id,
                origin_rank,
                plan,
                frame,
                ..
            } => (0..plan.frame_count)
                .map(|k| Unit {
                    id: format!("{id}@{k}"),
                    origin_rank: *origin_rank,
                    geometry: *frame,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub budget: u64,
    pub levels: Vec<u64>,
    pub max_len: usize,
    pub entries: Vec<PlanEntry>,
    pub pack: PackPlan,
}

impl PlanFile {
    pub fn units(&self) -> Vec<Unit> {
        self.entries.iter().flat_map(PlanEntry::units).collect()
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read plan {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("invalid plan {}: {e}", path.display())))
    }
}

fn data<E: std::fmt::Display>(id: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Data(format!("entry `{id}`: {e}"))
}

fn plan_entry(entry: &ManifestEntry, cfg: &PlanSettings) -> Result<PlanEntry, CliError> {
    match entry {
        ManifestEntry::Image {
            id,
            native_w,
            native_h,
            origin_rank,
            boxes,
            points,
        } => {
            let plan = plan_image(*native_w, *native_h).map_err(data(id))?;
            let mut regions = Vec::with_capacity(boxes.len() + points.len());
            for &[x1, y1, x2, y2] in boxes {
                let b = normalize_box(&PixelBox { x1, y1, x2, y2 }, *native_w, *native_h)
                    .map_err(data(id))?;
                regions.push(emit_region(&Region::Box(b)));
            }
            for &[x, y] in points {
                let p = normalize_point(x, y, *native_w, *native_h).map_err(data(id))?;
                regions.push(emit_region(&Region::Point(p)));
            }
            Ok(PlanEntry::Image {
                id: id.clone(),
                origin_rank: *origin_rank,
                plan,
                regions,
            })
        }
        ManifestEntry::Video {
            id,
            duration,
            task_kind,
            aspect,
            origin_rank,
        } => {
            let fps = cfg.policy.fps_for(*task_kind);
            let plan = plan_video(*duration, fps, &cfg.policy).map_err(data(id))?;
            let (w, h) = level_to_dims(plan.level, *aspect).map_err(data(id))?;
            let frame = ImagePlan::aligned(w, h).map_err(data(id))?;
            let timestamps = plan.timestamp_tokens();
            Ok(PlanEntry::Video {
                id: id.clone(),
                origin_rank: *origin_rank,
                task_kind: *task_kind,
                fps,
                duration: *duration,
                aspect: *aspect,
                plan,
                frame,
                timestamps,
            })
        }
    }
}

pub struct PlanSettings {
    pub policy: crate::videoplan::SamplingPolicy,
    pub max_len: usize,
}

pub fn plan(manifest: &Path, cfg: &PlanSettings) -> Result<PlanFile, CliError> {
    if cfg.max_len == 0 {
        return Err(CliError::Usage("--max-len must be positive".into()));
    }
    let entries = read_manifest(manifest)?
        .iter()
        .map(|e| plan_entry(e, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let items: Vec<PackItem> = entries
        .iter()
        .flat_map(PlanEntry::units)
        .map(|u| PackItem::new(u.id, u.geometry.token_count as usize))
        .collect();
    let pack = pack_ffd(&items, cfg.max_len).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(PlanFile {
        budget: cfg.policy.budget,
        levels: cfg.policy.levels.clone(),
        max_len: cfg.max_len,
        entries,
        pack,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviceLoad {
    pub device: usize,
    pub items: Vec<String>,
    pub load: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    pub cost_model: CostModel,
    pub devices: usize,
    pub group_size: usize,
    pub assignment: Vec<DeviceLoad>,
    pub makespan: f64,
    /// Absent when nothing was assigned.
    pub imbalance: Option<f64>,
}

pub fn work_items(units: &[Unit], model: &CostModel, devices: usize) -> Result<Vec<WorkItem>, CliError> {
    units
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let rank = u.origin_rank.unwrap_or(i % devices);
            if rank >= devices {
                return Err(CliError::Data(format!(
                    "`{}` has origin rank {rank} but only {devices} devices exist",
                    u.id
                )));
            }
            Ok(WorkItem::new(u.id.clone(), flops_cost(model, u.geometry.patch_count), rank))
        })
        .collect()
}

fn check_devices(devices: usize, group_size: usize) -> Result<(), CliError> {
    if devices == 0 {
        return Err(CliError::Usage("--devices must be positive".into()));
    }
    if group_size == 0 || devices % group_size != 0 {
        return Err(CliError::Usage(format!(
            "--group-size {group_size} does not divide --devices {devices}"
        )));
    }
    Ok(())
}

pub fn balance(
    plan: &Path,
    devices: usize,
    group_size: Option<usize>,
    model: CostModel,
) -> Result<BalanceReport, CliError> {
    let group_size = group_size.unwrap_or(devices);
    check_devices(devices, group_size)?;
    let plan = PlanFile::read(plan)?;
    let items = work_items(&plan.units(), &model, devices)?;
    let a = group_balance(&items, devices, group_size).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(balance_report(&a, model, group_size))
}

fn balance_report(a: &Assignment, model: CostModel, group_size: usize) -> BalanceReport {
    let assigned = a.devices.iter().any(|d| !d.is_empty());
    BalanceReport {
        cost_model: model,
        devices: a.device_count(),
        group_size,
        assignment: a
            .devices
            .iter()
            .zip(&a.loads)
            .enumerate()
            .map(|(device, (items, &load))| DeviceLoad {
                device,
                items: items.clone(),
                load,
            })
            .collect(),
        makespan: a.makespan(),
        imbalance: if assigned { imbalance(a).ok() } else { None },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// Columns (tokens, loss); both are logged.
    #[value(name = "power_law")]
    PowerLaw,
    /// Columns (loss, metric); the loss is logged.
    #[value(name = "metric")]
    Metric,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub mode: FitMode,
    pub columns: [String; 2],
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Power law only: `loss = scale / tokens^exponent`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Metric only: fitted metric per row, clamped to [0, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted: Option<Vec<f64>>,
}

fn read_columns(path: &Path) -> Result<([String; 2], Vec<(f64, f64)>), CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("bad CSV header: {e}")))?
        .clone();
    if headers.len() != 2 {
        return Err(CliError::Data(format!(
            "expected 2 columns, header has {}",
            headers.len()
        )));
    }
    let columns = [headers[0].to_owned(), headers[1].to_owned()];
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CliError::Data(format!("CSV line {line}: {e}")))?;
        let num = |k: usize| {
            rec.get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Data(format!("CSV line {line}: column {} is not a number", k + 1)))
        };
        rows.push((num(0)?, num(1)?));
    }
    if rows.len() < 2 {
        return Err(CliError::Data(format!("need at least 2 data rows, got {}", rows.len())));
    }
    Ok((columns, rows))
}

fn ln_positive(v: f64, what: &str) -> Result<f64, CliError> {
    if v > 0.0 {
        Ok(v.ln())
    } else {
        Err(CliError::Data(format!("{what} must be positive to take its log, got {v}")))
    }
}

pub fn fit(csv_path: &Path, mode: FitMode) -> Result<FitReport, CliError> {
    let (columns, rows) = read_columns(csv_path)?;
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for &(x, y) in &rows {
        xs.push(ln_positive(x, &columns[0])?);
        ys.push(match mode {
            FitMode::PowerLaw => ln_positive(y, &columns[1])?,
            FitMode::Metric => y,
        });
    }
    let line: LineFit = fit_line(&xs, &ys).map_err(|e| CliError::Data(e.to_string()))?;
    let mut report = FitReport {
        mode,
        columns,
        points: rows.len(),
        slope: line.slope,
        intercept: line.intercept,
        exponent: None,
        scale: None,
        fitted: None,
    };
    match mode {
        FitMode::PowerLaw => {
            let p = PowerLawFit::from(line);
            report.exponent = Some(p.exponent());
            report.scale = Some(p.scale());
        }
        FitMode::Metric => {
            let m = MetricFit::from(line);
            let fitted = rows
                .iter()
                .map(|&(loss, _)| predict_metric(&m, loss).map(|v| v.clamp(0.0, 1.0)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Data(e.to_string()))?;
            report.fitted = Some(fitted);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub topology: Topology,
    pub world: u64,
    pub bytes_per_dp_rank: u64,
    pub images: usize,
    pub partition: &'static str,
    pub io: IoReport,
}

pub struct SimulateArgs<'a> {
    pub plan: &'a Path,
    pub topology: Topology,
    pub bytes_per_dp_rank: u64,
    pub balanced: bool,
    pub model: CostModel,
}

pub fn simulate(args: &SimulateArgs<'_>) -> Result<SimulateReport, CliError> {
    let t = Topology::new(args.topology.dp, args.topology.pp, args.topology.tp)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let world = usize::try_from(t.world()).map_err(|_| CliError::Usage("world size overflows".into()))?;
    let plan = PlanFile::read(args.plan)?;
    let units = plan.units();
    let bytes: Vec<u64> = units.iter().map(|u| u.geometry.rgb_bytes()).collect();
    let io = if args.balanced {
        // origin ranks are ignored: the encoder shards over the whole world
        let items = units
            .iter()
            .map(|u| WorkItem::new(u.id.clone(), flops_cost(&args.model, u.geometry.patch_count), 0))
            .collect::<Vec<_>>();
        let a = crate::balancer::balance_lpt(&items, world).map_err(|e| CliError::Data(e.to_string()))?;
        let ids: Vec<String> = units.iter().map(|u| u.id.clone()).collect();
        simulate_io_assigned(&t, args.bytes_per_dp_rank, &bytes, &ids, &a)
    } else {
        simulate_io(&t, args.bytes_per_dp_rank, &bytes)
    }
    .map_err(|e| CliError::Data(e.to_string()))?;
    Ok(SimulateReport {
        topology: t,
        world: t.world(),
        bytes_per_dp_rank: args.bytes_per_dp_rank,
        images: units.len(),
        partition: if args.balanced { "balanced" } else { "round_robin" },
        io,
    })
}
