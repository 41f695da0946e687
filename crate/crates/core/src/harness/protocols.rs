use std::collections::BTreeMap;
use std::time::Instant;

use super::config::{ClassifierKind, DatasetSpec, ExperimentConfig, Protocol};
use super::metrics::{AuditPoint, ConfusionMatrix, IncrementMetrics, MemoryAudit, MetricsReport};
use crate::classify::{
    class_means, l2_normalize_rows, nearest_mean_predict, scale_from_targets, scaled_predict, MeanSource,
    ScaleVector,
};
use crate::data::{load_mnist_dir, make_schedule, synth_blobs, Dataset};
use crate::error::{Error, Result};
use crate::losses::{joint_loss, LossConfig, TargetBundle};
use crate::matrix::Matrix;
use crate::memory::{build_training_set, ExemplarStore};
use crate::netcore::{fit, predict_dataset, softmax_t, FrozenNetwork, Network, TrainConfig};
use crate::seed;

/// Train and test splits of one dataset.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub test: Dataset,
}

pub fn load_splits(spec: &DatasetSpec, seed: u64) -> Result<Splits> {
    match spec {
        DatasetSpec::Mnist { dir, train_limit } => {
            let s = load_mnist_dir(dir)?;
            let train = match train_limit {
                Some(n) if *n < s.train.len() => s.train.select(&(0..*n).collect::<Vec<_>>()),
                _ => s.train,
            };
            Ok(Splits { train, test: s.test })
        }
        DatasetSpec::Blobs {
            num_classes,
            train_per_class,
            test_per_class,
            dim,
            spread,
        } => {
            let per = train_per_class + test_per_class;
            let all = synth_blobs(*num_classes, per, *dim, *spread, seed)?;
            let (mut tr, mut te) = (Vec::new(), Vec::new());
            for i in 0..all.len() {
                if i % per < *train_per_class {
                    tr.push(i);
                } else {
                    te.push(i);
                }
            }
            Ok(Splits {
                train: all.select(&tr),
                test: all.select(&te),
            })
        }
    }
}

fn network_dims(cfg: &ExperimentConfig, input_dim: usize, num_classes: usize) -> Vec<usize> {
    let mut dims = vec![input_dim];
    dims.extend(&cfg.hidden_layers);
    dims.push(num_classes);
    dims
}

fn phase_config(train: &TrainConfig, phase: u64) -> TrainConfig {
    TrainConfig {
        seed: seed::derive(train.seed, phase),
        ..train.clone()
    }
}

/// Trains `net` on `data` with the joint loss. Soft targets, when given, hold
/// one row per sample of `data`.
fn train_phase(net: &mut Network, train: &TrainConfig, data: &Dataset, soft: Option<&Matrix>, loss: &LossConfig) -> Result<Vec<f64>> {
    fit(net, train, data, |logits, batch| {
        let targets = TargetBundle::new(data.one_hot(batch), soft.map(|s| s.select_rows(batch)))?;
        joint_loss(logits, &targets, loss)
    })
}

fn features_of(net: &Network, data: &Dataset, normalize: bool) -> Result<(Matrix, Matrix)> {
    let (logits, features) = predict_dataset(net, data)?;
    Ok((logits, if normalize { l2_normalize_rows(&features) } else { features }))
}

struct EvalInputs<'a> {
    net: &'a Network,
    test: &'a Dataset,
    /// Ascending class ids the heads may predict.
    classes: &'a [usize],
    scale: &'a ScaleVector,
    exemplars: Option<&'a Dataset>,
    ncm_data: &'a Dataset,
    normalize: bool,
}

/// Predictions of every requested head on `test`.
fn evaluate(kinds: &[ClassifierKind], inp: &EvalInputs<'_>) -> Result<BTreeMap<ClassifierKind, Vec<usize>>> {
    let (logits, features) = features_of(inp.net, inp.test, inp.normalize)?;
    let restricted = logits.select_cols(inp.classes);
    let to_class = |local: Vec<usize>| local.into_iter().map(|i| inp.classes[i]).collect::<Vec<_>>();
    let mut out = BTreeMap::new();
    for &kind in kinds {
        let pred = match kind {
            ClassifierKind::Tc => to_class(restricted.argmax_rows()),
            ClassifierKind::TcScaled => {
                let probs = softmax_t(&logits, 1.0)?.select_cols(inp.classes);
                let (_, labels) = scaled_predict(&probs, &inp.scale.restrict(inp.classes))?;
                to_class(labels)
            }
            ClassifierKind::Nem => {
                let ex = inp
                    .exemplars
                    .ok_or_else(|| Error::State("nem requested without an exemplar memory".into()))?;
                let means = class_means(inp.net, ex, inp.classes, MeanSource::Exemplar, inp.normalize)?;
                nearest_mean_predict(&means, &features)?
            }
            ClassifierKind::Ncm => {
                let means = class_means(inp.net, inp.ncm_data, inp.classes, MeanSource::FullData, inp.normalize)?;
                nearest_mean_predict(&means, &features)?
            }
        };
        out.insert(kind, pred);
    }
    Ok(out)
}

fn confusions(num_classes: usize, truth: &[usize], preds: &BTreeMap<ClassifierKind, Vec<usize>>) -> Result<BTreeMap<ClassifierKind, ConfusionMatrix>> {
    preds
        .iter()
        .map(|(&k, p)| Ok((k, ConfusionMatrix::from_predictions(num_classes, truth, p)?)))
        .collect()
}

/// State at the end of an incremental run.
#[derive(Debug, Clone)]
pub struct IncrementalRun {
    pub report: MetricsReport,
    pub network: Network,
    pub store: ExemplarStore,
}

/// Class-incremental protocol, without any file output.
///
/// Per increment: snapshot the teacher (none before the first group), train
/// on the new classes plus the stored exemplars, shrink every stored class to
/// `K / m`, select exemplars for the new classes, accumulate the scale vector
/// over this increment's training set, and evaluate on the test samples of
/// every class seen so far.
pub fn execute_incremental(cfg: &ExperimentConfig, splits: &Splits) -> Result<IncrementalRun> {
    cfg.validate()?;
    let Protocol::Incremental { increment_size } = cfg.protocol else {
        return Err(Error::Validation("config does not describe an incremental run".into()));
    };
    let started = Instant::now();
    let Splits { train, test } = splits;
    let k = train.num_classes();
    let schedule = make_schedule(k, increment_size, cfg.seed)?;
    let mut net = Network::new(&network_dims(cfg, train.dim(), k), cfg.seed)?;
    let mut store = ExemplarStore::new(cfg.budget, cfg.policy);
    let mut teacher: Option<FrozenNetwork> = None;
    let mut increments = Vec::new();
    let mut audit = Vec::new();
    let mut final_state = None;

    for (i, group) in schedule.groups().enumerate() {
        let mut seen = schedule.seen_through(i).to_vec();
        seen.sort_unstable();
        let new_data = train.subset(group.iter().copied());
        let train_set = build_training_set(&store, &new_data, train)?;

        let (loss, soft) = match &teacher {
            Some(t) => {
                let (logits, _) = predict_dataset(t.network(), &train_set)?;
                (cfg.loss(), Some(softmax_t(&logits, cfg.temperature)?))
            }
            None => (
                LossConfig {
                    gamma: 0.0,
                    temperature: cfg.temperature,
                },
                None,
            ),
        };
        let history = train_phase(&mut net, &phase_config(&cfg.train, i as u64), &train_set, soft.as_ref(), &loss)?;
        log::info!(
            "increment {i}: classes {group:?}, {} samples, final loss {:.4}",
            train_set.len(),
            history.last().copied().unwrap_or(f64::NAN)
        );

        store.rebalance(seen.len())?;
        audit.push(MemoryAudit {
            increment: i,
            after: AuditPoint::Rebalance,
            stored: store.total(),
            budget: cfg.budget,
        });
        let quota = store.quota_for(seen.len());
        if quota > 0 {
            for &c in group {
                let candidates = train.positions_of(c);
                let features = match cfg.policy {
                    crate::memory::SelectionPolicy::Herding => {
                        features_of(&net, &train.select(&candidates), cfg.normalize_features)?.1
                    }
                    crate::memory::SelectionPolicy::Random => Matrix::zeros(0, 0),
                };
                let pick_seed = seed::derive(cfg.seed, 10_000 + c as u64);
                store.select_for_class(c, &candidates, &features, quota, pick_seed)?;
            }
        }
        audit.push(MemoryAudit {
            increment: i,
            after: AuditPoint::Selection,
            stored: store.total(),
            budget: cfg.budget,
        });
        if store.total() > cfg.budget {
            return Err(Error::Consistency(format!(
                "memory holds {} exemplars, budget is {}",
                store.total(),
                cfg.budget
            )));
        }

        let scale = scale_from_targets(&train_set.labels(), soft.as_ref(), k, &loss)?;
        let exemplars = store.as_dataset(train)?;
        let test_seen = test.subset(seen.iter().copied());
        let ncm_data = train.subset(seen.iter().copied());
        let preds = evaluate(
            &cfg.classifiers,
            &EvalInputs {
                net: &net,
                test: &test_seen,
                classes: &seen,
                scale: &scale,
                exemplars: Some(&exemplars),
                ncm_data: &ncm_data,
                normalize: cfg.normalize_features,
            },
        )?;
        let truth = test_seen.labels();
        let cms = confusions(k, &truth, &preds)?;
        let accuracy = cms.iter().map(|(&kind, cm)| (kind, cm.accuracy())).collect();
        increments.push(IncrementMetrics {
            increment: i,
            classes_seen: seen.clone(),
            train_size: train_set.len(),
            exemplars: store.total(),
            accuracy,
        });
        final_state = Some((cms, scale));
        teacher = Some(net.snapshot());
    }

    let (confusion, scale) = final_state.expect("schedule has at least one group");
    Ok(IncrementalRun {
        report: MetricsReport {
            classifiers: cfg.classifiers.clone(),
            increments,
            confusion,
            scale: Some(scale),
            memory_audit: audit,
            teacher_accuracy: None,
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
        network: net,
        store,
    })
}

/// State at the end of a distill-bias run.
#[derive(Debug, Clone)]
pub struct DistillBiasRun {
    pub report: MetricsReport,
    pub teacher: FrozenNetwork,
    pub student: Network,
    /// The student's training set (all classes except the removed ones).
    pub student_train: Dataset,
}

/// Distillation-bias protocol, without any file output.
///
/// A teacher learns every class from the full training set. A freshly
/// initialised student learns from the training set minus the removed
/// classes, with the joint loss against the teacher, so the removed classes
/// reach it only through distillation. Both the plain and the rescaled
/// student heads, and the full-data NCM oracle, are scored on the full test set.
pub fn execute_distill_bias(cfg: &ExperimentConfig, splits: &Splits) -> Result<DistillBiasRun> {
    cfg.validate()?;
    let Protocol::DistillBias { removed_classes } = &cfg.protocol else {
        return Err(Error::Validation("config does not describe a distill-bias run".into()));
    };
    let started = Instant::now();
    let Splits { train, test } = splits;
    let k = train.num_classes();
    let dims = network_dims(cfg, train.dim(), k);

    let mut teacher_net = Network::new(&dims, seed::derive(cfg.seed, 1))?;
    train_phase(
        &mut teacher_net,
        &phase_config(&cfg.train, 1),
        train,
        None,
        &LossConfig::classification_only(),
    )?;
    let teacher = teacher_net.snapshot();
    let teacher_pred = teacher.logits(&test.inputs())?.argmax_rows();
    let truth = test.labels();
    let teacher_accuracy = ConfusionMatrix::from_predictions(k, &truth, &teacher_pred)?.accuracy();
    log::info!("teacher full-test accuracy {teacher_accuracy:.4}");

    let kept: Vec<usize> = (0..k).filter(|c| !removed_classes.contains(c)).collect();
    let student_train = train.subset(kept.iter().copied());
    let loss = cfg.loss();
    let soft = if loss.gamma > 0.0 {
        let (logits, _) = predict_dataset(teacher.network(), &student_train)?;
        Some(softmax_t(&logits, loss.temperature)?)
    } else {
        None
    };
    let mut student = Network::new(&dims, seed::derive(cfg.seed, 2))?;
    train_phase(&mut student, &phase_config(&cfg.train, 2), &student_train, soft.as_ref(), &loss)?;

    let scale = scale_from_targets(&student_train.labels(), soft.as_ref(), k, &loss)?;
    let all: Vec<usize> = (0..k).collect();
    let preds = evaluate(
        &cfg.classifiers,
        &EvalInputs {
            net: &student,
            test,
            classes: &all,
            scale: &scale,
            exemplars: None,
            ncm_data: train,
            normalize: cfg.normalize_features,
        },
    )?;
    let confusion = confusions(k, &truth, &preds)?;
    let accuracy = confusion.iter().map(|(&kind, cm)| (kind, cm.accuracy())).collect();
    let report = MetricsReport {
        classifiers: cfg.classifiers.clone(),
        increments: vec![IncrementMetrics {
            increment: 0,
            classes_seen: kept,
            train_size: student_train.len(),
            exemplars: 0,
            accuracy,
        }],
        confusion,
        scale: Some(scale),
        memory_audit: vec![],
        teacher_accuracy: Some(teacher_accuracy),
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok(DistillBiasRun {
        report,
        teacher,
        student,
        student_train,
    })
}
