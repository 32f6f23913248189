import os
import sys

import numpy as np
import torch

import argparser
import methods
from dataset import DatasetManifest, SyntheticSpec, generate_synthetic, load_dataset, save_dataset
from graph import VoteConfig, dump_matrix, extract_edge_topology, extract_subgraph_topology, topology_stats
from graph.sparse import spectral_radius
from metrics import compute_metrics
from modules.propagation import TOPOLOGIES, count_parameters, enumerate_terms, materialize_operator, propagate
from modules.propagation import build_operators
from train import TrainConfig, as_tensor, fit
from utils import append_run_record, atomic_write, csv_text, matrix_csv, set_seed, to_json, write_json
from utils.logger import Logger

PARAMS_HEADER = ['method', 'm', 'K', 'd0', 'd1', 'term_count', 'parameter_count', 'projection_parameters']


def synthetic_spec(opts):
    noise = opts.noise if len(opts.noise) != 1 else opts.noise[0]
    return SyntheticSpec(n=opts.n, m=opts.m, num_classes=opts.classes, p_in=opts.p_in, p_out=opts.p_out,
                         noise=noise, feat_dim=opts.feat_dim, snr=opts.snr, seed=opts.seed)


def get_dataset(opts, logger):
    """ Manifest-backed dataset, or a synthetic one built from the command line
    """
    if opts.manifest is not None:
        manifest = DatasetManifest.from_json(opts.manifest, opts.data_root)
        graph = load_dataset(manifest, logger.stdlib)
    else:
        graph = generate_synthetic(synthetic_spec(opts))
    logger.info(f"Dataset: {graph.name}, n={graph.n}, d0={graph.d0}, views={graph.view_names}, "
                f"train/val/test={int(graph.train_mask.sum())}/{int(graph.val_mask.sum())}/{int(graph.test_mask.sum())}")
    return graph


def get_topologies(opts, graph, needed, logger):
    cfg = VoteConfig(opts.threshold)
    edge = subgraph = None
    if 'edge' in needed:
        edge = extract_edge_topology(graph, cfg)
        logger.info(f"E: {topology_stats(edge)}")
    if 'subgraph' in needed:
        subgraph = extract_subgraph_topology(graph, cfg, keep_ties=opts.keep_ties, max_nnz=opts.max_nnz)
        logger.info(f"S: {topology_stats(subgraph)}")
    return edge, subgraph


def extract(opts, logger):
    graph = get_dataset(opts, logger)
    VoteConfig(opts.threshold).check(graph.m)
    edge, subgraph = get_topologies(opts, graph, TOPOLOGIES, logger)
    atomic_write(os.path.join(opts.out, 'E.txt'), dump_matrix(edge))
    atomic_write(os.path.join(opts.out, 'S.txt'), dump_matrix(subgraph))
    write_json(os.path.join(opts.out, 'stats.json'),
               {"threshold": opts.threshold, "E": topology_stats(edge), "S": topology_stats(subgraph)})


def train(opts, logger):
    graph = get_dataset(opts, logger)
    if methods.uses_topology(opts.method):
        VoteConfig(opts.threshold).check(graph.m)
    terms = enumerate_terms(opts.method, graph.m, opts.k, dedupe=opts.dedupe)
    needed = {f.kind for t in terms for f in t.factors if f.kind in TOPOLOGIES and f.power > 0}
    edge, subgraph = get_topologies(opts, graph, needed, logger)
    logger.info(f"Method: {methods.get_method(opts.method)['name']}, K={opts.k}, terms={len(terms)}")

    pf = propagate(graph, terms, edge, subgraph, normalize=opts.normalize, symmetrize=opts.symmetrize,
                   max_nnz=opts.max_nnz, progress=opts.progress)

    if opts.dump_matrix:
        operators = build_operators(graph, terms, edge, subgraph, normalize=opts.normalize)
        index = []
        for i, term in enumerate(terms):
            op = materialize_operator(term, operators, graph.n, opts.max_nnz)
            atomic_write(os.path.join(opts.out, 'operators', f"{i:03d}.txt"), dump_matrix(op))
            # power iteration only applies to symmetric operators
            radius = spectral_radius(op) if op.is_symmetric() else ''
            index.append((i, term.name, op.nnz, radius))
        atomic_write(os.path.join(opts.out, 'operators', 'index.csv'),
                     csv_text(['index', 'term', 'nnz', 'spectral_radius'], index))

    cfg = TrainConfig.from_opts(opts)
    logger.add_table("Opts", vars(opts))
    trainer, report = fit(pf, graph, cfg, opts.method, logger)

    audit = count_parameters(opts.method, graph.m, opts.k, graph.d0, opts.hidden, graph.num_classes, opts.dedupe)
    if audit.total != report["parameter_count"]:
        logger.warning(f"model holds {report['parameter_count']} parameters, audit expects {audit.total}")
    report["config"] = {"method": opts.method, "K": opts.k, "threshold": opts.threshold,
                        "normalize": opts.normalize, "symmetrize": opts.symmetrize, "dedupe": opts.dedupe,
                        "hidden": opts.hidden, "epochs": opts.epochs, "patience": opts.patience,
                        "seed": opts.seed, "dataset": graph.name}
    logger.info(f"Best cell: {report['best']}, test: {report['test']}")
    logger.add_results({"Test": report["test"] or {}})

    z, pred = trainer.predict(as_tensor(pf))
    write_json(os.path.join(opts.out, 'metrics.json'), report)
    atomic_write(os.path.join(opts.out, 'predictions.csv'),
                 csv_text(['node', 'pred'], zip(range(graph.n), pred.tolist())))
    if opts.dump_embeddings:
        atomic_write(os.path.join(opts.out, 'embeddings.csv'), matrix_csv(z.numpy()))


def params(opts, logger):
    rows = []
    for method in opts.methods:
        for m in opts.m:
            for k in range(1, opts.k_max + 1):
                r = count_parameters(method, m, k, opts.d0, opts.d1, opts.classes,
                                     dedupe=opts.dedupe and method == 'smgcn')
                rows.append((method, m, k, opts.d0, opts.d1, r.term_count, r.total, r.projection_parameters))
    text = csv_text(PARAMS_HEADER, rows)
    atomic_write(os.path.join(opts.out, 'params.csv'), text)
    sys.stdout.write(text)


def synth(opts, logger):
    graph = generate_synthetic(synthetic_spec(opts))
    path = save_dataset(graph, opts.out)
    logger.info(f"Wrote {graph} to {path}")


def evaluate(opts, logger):
    table = np.loadtxt(opts.predictions, delimiter=',', skiprows=1, dtype=np.int64, ndmin=2)
    nodes, pred = table[:, 0], table[:, 1]
    if opts.manifest is not None:
        graph = load_dataset(DatasetManifest.from_json(opts.manifest, opts.data_root), logger.stdlib)
        labels = graph.labels
        if opts.split == 'all':
            mask = labels >= 0
        else:
            mask = getattr(graph, f"{opts.split}_mask")
    else:
        labels = np.loadtxt(opts.labels, dtype=np.int64, ndmin=1)
        mask = labels >= 0
    if nodes.min() < 0 or nodes.max() >= len(labels):
        raise ValueError(f"prediction node ids fall outside 0..{len(labels) - 1}")
    full = np.full(len(labels), -1, dtype=np.int64)
    full[nodes] = pred
    mask = mask & (full >= 0)
    if not mask.any():
        raise ValueError("no labeled node has a prediction")
    metrics = compute_metrics(full[mask], labels[mask])
    report = {"split": opts.split if opts.manifest is not None else "labels", "nodes": int(mask.sum()),
              **metrics.to_report()}
    write_json(os.path.join(opts.out, 'eval.json'), report)
    sys.stdout.write(to_json(report))


SUBCOMMAND_FNS = {'extract': extract, 'train': train, 'params': params, 'synth': synth, 'eval': evaluate}


def main(opts, logger):
    torch.set_num_threads(opts.threads)
    set_seed(opts.seed)
    SUBCOMMAND_FNS[opts.subcommand](opts, logger)
    append_run_record(opts.out, opts.subcommand, opts)


def cli_main(argv=None):
    parser = argparser.get_argparser()
    opts = parser.parse_args(argv)
    opts = argparser.modify_command_options(opts, parser)

    logger = Logger(os.path.join(opts.logdir, opts.subcommand), opts.subcommand, debug=opts.debug,
                    summary=opts.visualize)
    try:
        main(opts, logger)
    except (ValueError, RuntimeError, OSError, FloatingPointError) as e:
        logger.error(str(e))
        return 1
    finally:
        logger.close()
    return 0


if __name__ == '__main__':
    sys.exit(cli_main())
