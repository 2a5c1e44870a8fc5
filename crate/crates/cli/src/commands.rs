//! The four subcommands: fit, predict, evaluate, synth.

use std::path::Path;

use marssl_core::dataset::{
    read_dataset_csv, read_predictions_csv, read_truth_csv, write_dataset_csv,
    write_predictions_csv, write_truth_csv, Dataset, TruthRecord,
};
use marssl_core::datagen::{gen_two_cluster_mar, mar_split_by_class, MarSplitConfig, TwoClusterConfig};
use marssl_core::dimred::{fit_pca, PcaMap};
use marssl_core::eval::{reliability_from_scores, ReliabilityDiagram};
use marssl_core::ssl::{
    fit_mar, fit_mcar_selftrain, fit_supervised, LabeledSet, MarModel, Prediction, UnlabeledSet,
};
use marssl_core::{Error, FeatureMatrix, Label};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{Method, RunConfig, SynthSpec};
use crate::CliError;

/// On-disk model: the fitted classifier plus the feature map that produced
/// its inputs, so prediction applies the identical transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub method: Method,
    pub pca: Option<PcaMap>,
    pub model: MarModel,
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    read_dataset_csv(path).map_err(CliError::input_err)
}

fn vstack(a: &FeatureMatrix, b: &FeatureMatrix) -> FeatureMatrix {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    out
}

pub fn cmd_fit(cfg: &RunConfig, seed: u64) -> Result<(), CliError> {
    let method = cfg.method.unwrap_or(Method::Mar);
    let labeled_path = cfg.require(cfg.labeled.as_ref(), "labeled")?;
    let model_path = cfg.require(cfg.model.as_ref(), "model")?;

    let labeled = read_dataset(&labeled_path)?;
    if let Some(row) = labeled.first_unlabeled_row() {
        return Err(CliError::input(format!(
            "{}: row {row}: missing label in labeled dataset",
            labeled_path.display()
        )));
    }
    if labeled.is_empty() {
        return Err(CliError::input(format!(
            "{}: labeled dataset has no rows",
            labeled_path.display()
        )));
    }

    let unlabeled = match (method, cfg.unlabeled.as_ref()) {
        (Method::Supervised, Some(path)) => {
            eprintln!(
                "warning: method=supervised ignores the unlabeled dataset {}",
                path.display()
            );
            None
        }
        (Method::Supervised, None) => None,
        (_, Some(path)) => Some(read_dataset(path)?),
        (_, None) => {
            return Err(CliError::input(format!(
                "method={} requires an unlabeled dataset",
                method.as_str()
            )))
        }
    };

    if let Some(u) = &unlabeled {
        if !u.is_empty() && u.dim() != labeled.dim() {
            return Err(CliError::shape(Error::DimMismatch {
                expected: labeled.dim(),
                found: u.dim(),
            }));
        }
    }

    // Fit the feature map on everything available and persist it with the
    // model so prediction applies the same transform.
    let pca = match cfg.pca_dim {
        None => None,
        Some(r) => {
            let pooled = match &unlabeled {
                Some(u) if !u.is_empty() => vstack(&labeled.features, &u.features),
                _ => labeled.features.clone(),
            };
            Some(fit_pca(&pooled, r).map_err(CliError::fit_err)?.map)
        }
    };
    let transform = |m: &FeatureMatrix| -> Result<FeatureMatrix, CliError> {
        match &pca {
            Some(map) => map.transform(m).map_err(CliError::fit_err),
            None => Ok(m.clone()),
        }
    };

    let labels: Vec<Label> = labeled.labels.iter().map(|l| l.unwrap()).collect();
    let d1 = LabeledSet::new(transform(&labeled.features)?, labels).map_err(CliError::fit_err)?;
    let vb = cfg.vb.clone().unwrap_or_default().to_config(seed);
    let kappa = cfg.kappa.unwrap_or(0.0);

    let model = match method {
        Method::Supervised => fit_supervised(&d1, &vb),
        Method::Mar | Method::Mcar => {
            let u = unlabeled.expect("checked above");
            let d0 = if u.is_empty() {
                UnlabeledSet::empty(d1.dim())
            } else {
                UnlabeledSet::new(transform(&u.features)?).map_err(CliError::fit_err)?
            };
            match method {
                Method::Mar => fit_mar(&d1, &d0, kappa, &vb, seed),
                _ => fit_mcar_selftrain(&d1, &d0, &vb, seed),
            }
        }
    }
    .map_err(CliError::fit_err)?;

    let file = ModelFile { method, pca, model };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::fit(format!("serializing model: {e}")))?;
    std::fs::write(&model_path, json).map_err(CliError::input_err)?;

    let m = &file.model;
    let classes: Vec<String> = m
        .label_set()
        .iter()
        .zip(m.class_counts())
        .map(|(l, c)| format!("{l}:{c}"))
        .collect();
    println!(
        "fit method={} augmented={} residual={} w={} classes={}",
        method.as_str(),
        m.augmented_count(),
        m.residual_count(),
        m.w(),
        classes.join(",")
    );
    Ok(())
}

pub fn cmd_predict(cfg: &RunConfig, _seed: u64) -> Result<(), CliError> {
    let model_path = cfg.require(cfg.model.as_ref(), "model")?;
    let test_path = cfg.require(cfg.test.as_ref(), "test")?;
    let out_path = cfg.require(cfg.predictions.as_ref(), "predictions")?;

    let text = std::fs::read_to_string(&model_path)
        .map_err(|e| CliError::input(format!("{}: {e}", model_path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", model_path.display())))?;
    let test = read_dataset(&test_path)?;

    let expected_dim = file
        .pca
        .as_ref()
        .map(|p| p.input_dim())
        .unwrap_or_else(|| file.model.dim());
    if !test.is_empty() && test.dim() != expected_dim {
        return Err(CliError::shape(Error::DimMismatch {
            expected: expected_dim,
            found: test.dim(),
        }));
    }

    let features = if test.is_empty() {
        test.features.clone()
    } else {
        match &file.pca {
            Some(map) => map.transform(&test.features).map_err(CliError::shape)?,
            None => test.features.clone(),
        }
    };
    let mut predictions: Vec<Prediction> = Vec::with_capacity(features.nrows());
    let mut x = vec![0.0; file.model.dim()];
    for i in 0..features.nrows() {
        for j in 0..file.model.dim() {
            x[j] = features[(i, j)];
        }
        predictions.push(file.model.predict(&x).map_err(CliError::shape)?);
    }
    write_predictions_csv(&out_path, file.model.label_set(), &predictions)
        .map_err(CliError::input_err)?;
    println!(
        "predict n={} method={} model={}",
        predictions.len(),
        file.method.as_str(),
        model_path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SubsetSummary {
    count: usize,
    accuracy: f64,
    ece: f64,
}

#[derive(Serialize)]
struct EvalSummary {
    n: usize,
    bins: usize,
    accuracy: f64,
    ece: f64,
    rare: Option<SubsetSummary>,
    rest: Option<SubsetSummary>,
}

pub fn cmd_evaluate(cfg: &RunConfig, _seed: u64) -> Result<(), CliError> {
    let pred_path = cfg.require(cfg.predictions.as_ref(), "predictions")?;
    let truth_path = cfg.require(cfg.truth.as_ref(), "truth")?;
    let out_dir = cfg.require(cfg.out_dir.as_ref(), "out_dir")?;
    let n_bins = cfg.bins.unwrap_or(10);

    let (_, predictions) = read_predictions_csv(&pred_path).map_err(CliError::input_err)?;
    let (truth, has_mask) = read_truth_csv(&truth_path).map_err(CliError::input_err)?;
    if predictions.len() != truth.len() {
        return Err(CliError::alignment(Error::LengthMismatch {
            left: predictions.len(),
            right: truth.len(),
        }));
    }
    for (p, t) in predictions.iter().zip(&truth) {
        if p.index != t.index {
            return Err(CliError::alignment(format!(
                "prediction index {} does not match truth index {}",
                p.index, t.index
            )));
        }
    }
    if predictions.is_empty() {
        return Err(CliError::input("no predictions to evaluate"));
    }

    let scores: Vec<f64> = predictions.iter().map(|p| p.error_prob).collect();
    let correct: Vec<bool> = predictions
        .iter()
        .zip(&truth)
        .map(|(p, t)| p.label == t.label)
        .collect();
    let full = reliability_from_scores(&scores, &correct, n_bins).map_err(CliError::alignment)?;

    std::fs::create_dir_all(&out_dir).map_err(CliError::input_err)?;
    write_diagram(&out_dir.join("reliability.csv"), &full)?;

    let subset = |want: bool| -> Result<Option<(usize, ReliabilityDiagram)>, CliError> {
        let qs: Vec<f64> = scores
            .iter()
            .zip(&truth)
            .filter(|(_, t)| t.rare == want)
            .map(|(&q, _)| q)
            .collect();
        if qs.is_empty() {
            return Ok(None);
        }
        let oks: Vec<bool> = correct
            .iter()
            .zip(&truth)
            .filter(|(_, t)| t.rare == want)
            .map(|(&c, _)| c)
            .collect();
        let d = reliability_from_scores(&qs, &oks, n_bins).map_err(CliError::alignment)?;
        Ok(Some((qs.len(), d)))
    };

    let (rare, rest) = if has_mask {
        (subset(true)?, subset(false)?)
    } else {
        (None, None)
    };
    if let Some((_, d)) = &rare {
        write_diagram(&out_dir.join("reliability_rare.csv"), d)?;
    }
    if let Some((_, d)) = &rest {
        write_diagram(&out_dir.join("reliability_rest.csv"), d)?;
    }

    let summary = EvalSummary {
        n: predictions.len(),
        bins: n_bins,
        accuracy: full.overall_accuracy,
        ece: full.ece,
        rare: rare.map(|(count, d)| SubsetSummary {
            count,
            accuracy: d.overall_accuracy,
            ece: d.ece,
        }),
        rest: rest.map(|(count, d)| SubsetSummary {
            count,
            accuracy: d.overall_accuracy,
            ece: d.ece,
        }),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::input(format!("serializing summary: {e}")))?;
    std::fs::write(out_dir.join("summary.json"), json).map_err(CliError::input_err)?;
    println!(
        "evaluate n={} accuracy={} ece={}",
        summary.n, summary.accuracy, summary.ece
    );
    Ok(())
}

fn write_diagram(path: &Path, diagram: &ReliabilityDiagram) -> Result<(), CliError> {
    std::fs::write(path, diagram.to_csv_string()).map_err(CliError::input_err)
}

pub fn cmd_synth(cfg: &RunConfig, seed: u64) -> Result<(), CliError> {
    let spec = cfg
        .synth
        .as_ref()
        .ok_or_else(|| CliError::input("missing required setting \"synth\""))?;
    let out_dir = cfg.require(cfg.out_dir.as_ref(), "out_dir")?;
    std::fs::create_dir_all(&out_dir).map_err(CliError::input_err)?;

    match spec {
        SynthSpec::TwoCluster {
            n_labeled,
            n_unlabeled,
            n_test,
            cluster_separation,
            class_boundary_axis,
            noise_scale,
        } => {
            let gen_cfg = TwoClusterConfig {
                n_labeled: *n_labeled,
                n_unlabeled: *n_unlabeled,
                cluster_separation: *cluster_separation,
                class_boundary_axis: *class_boundary_axis,
                noise_scale: *noise_scale,
                seed,
            };
            let sc = gen_two_cluster_mar(&gen_cfg).map_err(CliError::input_err)?;
            let labels: Vec<Option<Label>> = sc.labeled.labels().iter().map(|&l| Some(l)).collect();
            write_dataset_csv(&out_dir.join("labeled.csv"), sc.labeled.features(), &labels)
                .map_err(CliError::input_err)?;
            write_dataset_csv(
                &out_dir.join("unlabeled.csv"),
                sc.unlabeled.features(),
                &vec![None; sc.unlabeled.len()],
            )
            .map_err(CliError::input_err)?;
            let truth: Vec<TruthRecord> = sc
                .unlabeled_truth
                .iter()
                .zip(&sc.unlabeled_from_far_cluster)
                .enumerate()
                .map(|(index, (&label, &rare))| TruthRecord { index, label, rare })
                .collect();
            write_truth_csv(&out_dir.join("unlabeled_truth.csv"), &truth)
                .map_err(CliError::input_err)?;
            let mut n_test_written = 0;
            if let Some(n_test) = n_test {
                // an independent draw from the same scenario serves as the
                // evaluation split
                let test_cfg = TwoClusterConfig {
                    n_labeled: 2,
                    n_unlabeled: *n_test,
                    seed: seed.wrapping_add(1),
                    ..gen_cfg
                };
                let ts = gen_two_cluster_mar(&test_cfg).map_err(CliError::input_err)?;
                write_dataset_csv(
                    &out_dir.join("test.csv"),
                    ts.unlabeled.features(),
                    &vec![None; ts.unlabeled.len()],
                )
                .map_err(CliError::input_err)?;
                let truth: Vec<TruthRecord> = ts
                    .unlabeled_truth
                    .iter()
                    .zip(&ts.unlabeled_from_far_cluster)
                    .enumerate()
                    .map(|(index, (&label, &rare))| TruthRecord { index, label, rare })
                    .collect();
                write_truth_csv(&out_dir.join("test_truth.csv"), &truth)
                    .map_err(CliError::input_err)?;
                n_test_written = ts.unlabeled.len();
            }
            println!(
                "synth scenario=two_cluster labeled={} unlabeled={} test={}",
                sc.labeled.len(),
                sc.unlabeled.len(),
                n_test_written
            );
        }
        SynthSpec::MarSplit {
            source,
            n_labeled_total,
            rare_labels,
            rare_label_fraction,
        } => {
            let data = read_dataset(source)?;
            if let Some(row) = data.first_unlabeled_row() {
                return Err(CliError::input(format!(
                    "{}: row {row}: missing label in split source",
                    source.display()
                )));
            }
            let labels: Vec<Label> = data.labels.iter().map(|l| l.unwrap()).collect();
            let split_cfg = MarSplitConfig {
                rare_labels: rare_labels.clone(),
                n_labeled_total: *n_labeled_total,
                rare_label_fraction: *rare_label_fraction,
                seed,
            };
            let split =
                mar_split_by_class(&data.features, &labels, &split_cfg).map_err(CliError::input_err)?;
            let lab: Vec<Option<Label>> = split.labeled.labels().iter().map(|&l| Some(l)).collect();
            write_dataset_csv(&out_dir.join("labeled.csv"), split.labeled.features(), &lab)
                .map_err(CliError::input_err)?;
            write_dataset_csv(
                &out_dir.join("unlabeled.csv"),
                split.unlabeled.features(),
                &vec![None; split.unlabeled.len()],
            )
            .map_err(CliError::input_err)?;
            let truth: Vec<TruthRecord> = split
                .unlabeled_truth
                .iter()
                .enumerate()
                .map(|(index, &label)| TruthRecord {
                    index,
                    label,
                    rare: rare_labels.contains(&label),
                })
                .collect();
            write_truth_csv(&out_dir.join("unlabeled_truth.csv"), &truth)
                .map_err(CliError::input_err)?;
            println!(
                "synth scenario=mar_split labeled={} unlabeled={}",
                split.labeled.len(),
                split.unlabeled.len()
            );
        }
    }
    Ok(())
}
