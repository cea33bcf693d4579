use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{CliError, Command, RunConfig};
use crate::analysis::{conserves_cases, icc_cells, icc_rank, pair_frequency};
use crate::classifier::{cross_validate, fit, fold_seed, prepare_fold, saliency, save_model};
use crate::context::{class_means, contextualize};
use crate::data::{discretize, gen_swiss_roll, load_csv, make_folds, DiscreteDataset};
use crate::encoder::{
    decode, encode_all, export_case, read_image, EncodingConfig, Pairing, Sidecar, CONTEXT_SUFFIX,
};
use crate::optimize::random_search;
use crate::{Error, Result};

type CliResult = std::result::Result<(), CliError>;

pub(super) fn execute(command: Command, config: &RunConfig) -> CliResult {
    std::fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    config.save(&config.out.join("run_config.json"))?;
    match command {
        Command::Encode => encode_cmd(config),
        Command::Synth => synth_cmd(config),
        Command::Cv => cv_cmd(config),
        Command::Optimize => optimize_cmd(config),
        Command::Icc => icc_cmd(config),
        Command::Freq => freq_cmd(config),
        Command::Saliency => saliency_cmd(config),
        Command::Decode => decode_cmd(config),
    }
}

/// Loaded, discretized input plus the encoding it will use.
struct Prepared {
    data: DiscreteDataset,
    pairing: Pairing,
    encoding: EncodingConfig,
}

fn prepare(config: &RunConfig) -> std::result::Result<Prepared, CliError> {
    let path = config
        .data
        .as_ref()
        .ok_or_else(|| CliError::Usage("--data is required for this command".into()))?;
    let raw = load_csv(path, config.label_col.parse().expect("infallible"))?;
    let schema = config.binning_schema(&raw)?;
    let mut data = discretize(&raw, &schema)?;
    if let Some(stem) = path.file_stem() {
        data.name = stem.to_string_lossy().into_owned();
    }
    let pairing = config.pairing_for(data.n_values())?;
    let encoding = config.encoding_for(pairing.pair_count())?;
    log::info!(
        "{}: {} cases, {} values, {} classes",
        data.name,
        data.len(),
        data.n_values(),
        data.n_classes()
    );
    Ok(Prepared {
        data,
        pairing,
        encoding,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn encode_cmd(config: &RunConfig) -> CliResult {
    let p = prepare(config)?;
    let images = encode_all(&p.data, &p.pairing, &p.encoding)?;
    let dir = config.out.join("images");
    let sidecar = |i: usize| Sidecar {
        dataset: p.data.name.clone(),
        case_id: p.data.points[i].case_id(),
        label: Some(p.data.points[i].label()),
        class_name: p.data.class_names.get(p.data.points[i].label()).cloned(),
        config: p.encoding.clone(),
        pairing: p.pairing.clone(),
    };
    for (i, image) in images.iter().enumerate() {
        export_case(&dir, image, &sidecar(i), "", config.pnm)?;
    }
    if let Some(mode) = config.context {
        log::warn!("context images use means over every case; split before training on them");
        let means = class_means(&images, &p.data.labels(), p.data.n_classes())?;
        let mean_dir = config.out.join("means");
        std::fs::create_dir_all(&mean_dir).map_err(|e| Error::io(&mean_dir, e))?;
        for m in &means {
            m.save(&mean_dir.join(format!("class_{}", m.label)))?;
        }
        for (i, image) in images.iter().enumerate() {
            let ctx = contextualize(image, &means, mode)?;
            export_case(&dir, &ctx, &sidecar(i), CONTEXT_SUFFIX, config.pnm)?;
        }
    }
    log::info!("wrote {} images to {}", images.len(), dir.display());
    Ok(())
}

fn synth_cmd(config: &RunConfig) -> CliResult {
    let s = &config.synth;
    let data = gen_swiss_roll(s.dim, s.n_per_class, s.noise, config.seed)?;
    let path = config.out.join("swiss_roll.csv");
    data.write_csv(&path)?;
    log::info!("wrote {} cases to {}", data.len(), path.display());
    Ok(())
}

fn cv_cmd(config: &RunConfig) -> CliResult {
    let p = prepare(config)?;
    let plan = make_folds(&p.data, config.folds, config.stratified, config.seed)?;
    let report = cross_validate(
        &p.data,
        &p.pairing,
        &p.encoding,
        config.context,
        &plan,
        &config.architecture,
        &config.train_config(),
    )?;
    log::info!(
        "mean accuracy {:.4} over {} folds in {:.1?}",
        report.mean_accuracy,
        report.folds.len(),
        report.wall_clock
    );
    write_json(&config.out.join("cv_report.json"), &report)?;
    Ok(())
}

#[derive(Serialize)]
struct HoldoutResult {
    fold: usize,
    baseline_accuracy: f64,
    best_accuracy: f64,
}

fn optimize_cmd(config: &RunConfig) -> CliResult {
    let p = prepare(config)?;
    let spec = config.search_spec();
    let (search_data, outer) = match config.fold {
        Some(fold) => {
            let plan = make_folds(&p.data, config.folds, config.stratified, config.seed)?;
            if fold >= plan.k {
                return Err(CliError::Usage(format!(
                    "--fold {fold} is outside 0..{}",
                    plan.k
                )));
            }
            (p.data.subset(&plan.train_indices(fold)), Some((plan, fold)))
        }
        None => {
            log::warn!("searching on every case; pass --fold to hold data out");
            (p.data.clone(), None)
        }
    };
    let trace = random_search(&search_data, &spec, &p.encoding)?;
    log::info!(
        "baseline {:.4}, best {:.4} (candidate {})",
        trace.baseline().accuracy,
        trace.best_candidate().accuracy,
        trace.best
    );
    write_json(&config.out.join("search_trace.json"), &trace)?;
    write_json(&config.out.join("best_config.json"), &trace.best_fragment())?;

    if let Some((plan, fold)) = outer {
        trace.check_no_leakage(&plan, fold)?;
        let held = |pairing: &Pairing, schedule| -> Result<f64> {
            let encoding = p.encoding.clone().with_schedule(schedule);
            let images = encode_all(&p.data, pairing, &encoding)?;
            let labels = p.data.labels();
            let f = prepare_fold(&images, &labels, p.data.n_classes(), &plan, fold, config.context)?;
            let (train_images, val_images) = (f.train_images, f.validation_images);
            let train_labels: Vec<usize> = f.train_idx.iter().map(|&i| labels[i]).collect();
            let val_idx = f.validation_idx;
            let train = config.train_config();
            let (model, _) = fit(
                &train_images,
                &train_labels,
                p.data.n_classes(),
                &config.architecture,
                &train,
                fold_seed(config.seed, fold),
            )?;
            let inputs: Vec<Vec<f64>> = val_images.iter().map(|i| train.input(i)).collect();
            let val_labels: Vec<usize> = val_idx.iter().map(|&i| labels[i]).collect();
            model.accuracy(&inputs, &val_labels)
        };
        let base = trace.baseline();
        let best = trace.best_candidate();
        let result = HoldoutResult {
            fold,
            baseline_accuracy: held(&base.pairing, base.schedule.clone())?,
            best_accuracy: held(&best.pairing, best.schedule.clone())?,
        };
        log::info!(
            "held-out fold {fold}: baseline {:.4}, best {:.4}",
            result.baseline_accuracy,
            result.best_accuracy
        );
        write_json(&config.out.join("holdout.json"), &result)?;
    }
    Ok(())
}

fn icc_cmd(config: &RunConfig) -> CliResult {
    let p = prepare(config)?;
    let plan = make_folds(&p.data, config.folds, config.stratified, config.seed)?;
    let report = icc_rank(
        &p.data,
        &p.pairing,
        &p.encoding,
        config.context,
        config.block,
        &plan,
        &config.architecture,
        &config.train_config(),
    )?;
    log::info!(
        "most informative cell {} ({:.4} vs {:.4} uncovered)",
        report.most_informative,
        report.accuracy_of(report.most_informative),
        report.baseline_accuracy
    );
    write_json(&config.out.join("icc_report.json"), &report)?;
    write_text(&config.out.join("icc_report.txt"), &report.to_text())?;
    Ok(())
}

fn freq_cmd(config: &RunConfig) -> CliResult {
    let p = prepare(config)?;
    let all = icc_cells(config.grid, config.block)?;
    let chosen = if config.cells.is_empty() {
        all.clone()
    } else {
        config
            .cells
            .iter()
            .map(|&id| {
                all.get(id.wrapping_sub(1)).copied().ok_or_else(|| {
                    CliError::Usage(format!("cell {id} is outside 1..={}", all.len()))
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    let tables = chosen
        .iter()
        .map(|c| pair_frequency(&p.data, &p.pairing, c))
        .collect::<Result<Vec<_>>>()?;
    if chosen.len() == all.len() && !conserves_cases(&tables, p.pairing.pair_count()) {
        return Err(Error::invalid("frequency totals do not add up to the case count").into());
    }
    write_json(&config.out.join("frequency.json"), &tables)?;
    let text: Vec<String> = tables.iter().map(|t| t.to_text()).collect();
    write_text(&config.out.join("frequency.txt"), &text.join("\n"))?;
    Ok(())
}

#[derive(Serialize)]
struct SaliencyRecord {
    case_id: usize,
    label: usize,
    class: usize,
    predicted: usize,
    /// Relative to the output directory.
    image: PathBuf,
    gradient: Vec<f64>,
}

fn saliency_cmd(config: &RunConfig) -> CliResult {
    let p = prepare(config)?;
    let labels = p.data.labels();
    let mut images = encode_all(&p.data, &p.pairing, &p.encoding)?;
    if let Some(mode) = config.context {
        let means = class_means(&images, &labels, p.data.n_classes())?;
        images = images
            .iter()
            .map(|i| contextualize(i, &means, mode))
            .collect::<Result<Vec<_>>>()?;
    }
    let train = config.train_config();
    let (model, _) = fit(
        &images,
        &labels,
        p.data.n_classes(),
        &config.architecture,
        &train,
        config.seed,
    )?;
    save_model(&model, Some(&train), config.out.join("model.ckpt"))?;

    let ids = p.data.case_ids();
    let wanted = if config.cases.is_empty() {
        vec![ids[0]]
    } else {
        config.cases.clone()
    };
    let dir = config.out.join("saliency");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut records = Vec::new();
    for id in wanted {
        let i = ids
            .iter()
            .position(|&c| c == id)
            .ok_or_else(|| CliError::Usage(format!("case {id} is not in {}", p.data.name)))?;
        let class = config.class.unwrap_or(labels[i]);
        let map = saliency(&model, &images[i], class, train.input_divisor)?;
        let name = format!("{}_{id}_class{class}.png", p.data.name);
        map.write_png(dir.join(&name))?;
        records.push(SaliencyRecord {
            case_id: id,
            label: labels[i],
            class,
            predicted: model.predict(&train.input(&images[i]))?,
            image: Path::new("saliency").join(name),
            gradient: map.gradient,
        });
    }
    write_json(&config.out.join("saliency.json"), &records)?;
    Ok(())
}

#[derive(Serialize)]
struct Decoded {
    case_id: usize,
    label: Option<usize>,
    values: Vec<u32>,
}

fn decode_cmd(config: &RunConfig) -> CliResult {
    let image_path = config
        .image
        .as_ref()
        .ok_or_else(|| CliError::Usage("--image is required for decode".into()))?;
    let sidecar_path = config
        .sidecar
        .clone()
        .unwrap_or_else(|| image_path.with_extension("json"));
    let sidecar = Sidecar::read(&sidecar_path)?;
    let mut image = read_image(image_path)?;
    image.meta = Some(sidecar.meta());
    let point = decode(&image, &sidecar.pairing, &sidecar.config)?;
    write_json(
        &config.out.join("decoded.json"),
        &Decoded {
            case_id: point.case_id(),
            label: sidecar.label,
            values: point.values().to_vec(),
        },
    )?;
    Ok(())
}
