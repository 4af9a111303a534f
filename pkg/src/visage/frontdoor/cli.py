"""Command-line front end. Every command is a thin mapping onto module
operations; ``--json`` switches stdout to machine-readable output.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from ..cascade import (CascadeTrainParams, ScanParams, detect_multiscale,
                       import_opencv_xml, load_cascade, save_cascade,
                       train_cascade)
from ..errors import VisageError
from ..imgcore import read_netpbm, to_grayscale
from ..landmarks import write_landmarks_csv
from ..pipeline import (SyntheticSpec, benchmark, evaluate_session,
                        generate_synthetic, train_session, write_manifest)
from ..pipeline.manifest import load_manifest_sequences, load_sequence
from ..pipeline.session import Session
from ..pipeline.synthetic import (synthetic_background_patches,
                                  synthetic_face_patches)
from ..svm import load_model, save_model
from .config import load_session_config


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(args, payload, text: str | None = None):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    elif text is not None:
        print(text)


def cmd_gen_synth(args):
    classes = tuple(args.classes.split(","))
    spec = SyntheticSpec(seed=args.seed, classes=classes,
                         sequences_per_class=args.sequences_per_class,
                         frames=args.frames, width=args.width, height=args.height,
                         color=args.color, noise=args.noise,
                         max_deform=args.max_deform)
    entries = generate_synthetic(spec, args.out)
    if args.train_split is not None:
        by_class = {}
        for label, seq_dir in entries:
            by_class.setdefault(label, []).append(seq_dir)
        train, test = [], []
        for label, dirs in by_class.items():
            train += [(label, d) for d in dirs[:args.train_split]]
            test += [(label, d) for d in dirs[args.train_split:]]
        write_manifest(os.path.join(args.out, "train.tsv"), train)
        write_manifest(os.path.join(args.out, "test.tsv"), test)
    _emit(args, {"sequences": len(entries), "out": args.out},
          f"wrote {len(entries)} sequences under {args.out}")
    return 0


def cmd_train_cascade(args):
    if args.synth_seed is not None:
        pos = synthetic_face_patches(args.positives, args.synth_seed)
        neg = synthetic_background_patches(args.negatives, args.synth_seed)
    else:
        if not args.pos or not args.neg:
            raise VisageError("need --pos and --neg patch dirs, or --synth-seed")
        pos = [read_netpbm(os.path.join(args.pos, f))
               for f in sorted(os.listdir(args.pos)) if f.endswith(".pgm")]
        neg = [read_netpbm(os.path.join(args.neg, f))
               for f in sorted(os.listdir(args.neg)) if f.endswith(".pgm")]
    rounds = tuple(int(r) for r in args.rounds.split(","))
    params = CascadeTrainParams(max_stages=args.stages, rounds_per_stage=rounds,
                                pool_stride=args.pool_stride, pool_cap=args.pool_cap,
                                label=args.label)
    cascade = train_cascade(pos, neg, params)
    save_cascade(cascade, args.out)
    _emit(args, {"stages": len(cascade.stages), "out": args.out},
          f"trained {len(cascade.stages)}-stage cascade -> {args.out}")
    return 0


def cmd_detect(args):
    cascade = load_cascade(args.cascade)
    img = read_netpbm(args.image)
    gray = to_grayscale(img) if img.ndim == 3 else img
    scan = ScanParams(scale_start=args.scale_start, scale_factor=args.scale_factor,
                      step=args.step)
    detections = detect_multiscale(cascade, gray, scan)
    payload = [{"box": list(d.box), "neighbors": d.neighbors} for d in detections]
    _emit(args, payload, "\n".join(
        f"{d.box.x} {d.box.y} {d.box.w} {d.box.h} neighbors={d.neighbors}"
        for d in detections) or "no detections")
    return 0


def cmd_track(args):
    config = load_session_config(args.config)
    frames = load_sequence(args.frames)
    session = Session(config)
    out = sys.stdout if args.csv is None else open(args.csv, "w", encoding="utf-8")
    try:
        out.write("frame,point_index,region,x,y,valid\n")
        for frame in frames:
            result = session.process_frame(frame)
            if result.landmarks is not None:
                write_landmarks_csv(out, result.index, result.landmarks)
    finally:
        if args.csv is not None:
            out.close()
    return 0


def cmd_train(args):
    config = load_session_config(args.config)
    sequences = load_manifest_sequences(args.manifest)
    model, report = train_session(sequences, config)
    save_model(model, args.out)
    payload = report.to_dict()
    payload["model"] = args.out
    _emit(args, payload,
          f"model -> {args.out}\nbest C={report.best_c} gamma={report.best_gamma} "
          f"cv accuracy {100 * report.cv_accuracy:.2f}%")
    return 0


def cmd_evaluate(args):
    config = load_session_config(args.config)
    model = load_model(args.model)
    sequences = load_manifest_sequences(args.manifest)
    report = evaluate_session(model, sequences, config)
    _emit(args, report.to_dict(), report.matrix.to_text())
    return 0


def cmd_benchmark(args):
    config = load_session_config(args.config)
    model = load_model(args.model) if args.model else None
    sequences = load_manifest_sequences(args.manifest)
    report = benchmark(sequences, config, model=model)
    text = (f"{report.frames} frames, {report.ms_per_10_frames:.1f} ms per 10 frames "
            f"(median frame {report.median_frame_ms:.2f} ms, p95 {report.p95_frame_ms:.2f} ms)\n"
            f"stage medians (us): {report.stage_medians_us}\n"
            f"stage accounting {'ok' if report.accounting_ok else 'VIOLATED'}")
    _emit(args, report.to_dict(), text)
    return 0


def cmd_import_cascade_xml(args):
    cascade = import_opencv_xml(args.xml, mirror=args.mirror)
    save_cascade(cascade, args.out)
    _emit(args, {"stages": len(cascade.stages), "out": args.out},
          f"imported {len(cascade.stages)} stages -> {args.out}")
    return 0


def cmd_serve(args):
    from .service import serve
    config = load_session_config(args.config)
    server = serve(config, args.port, host=args.host)
    print(f"listening on http://{args.host}:{server.server_address[1]}",
          file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="visage",
                     description="facial expression trainer/evaluator pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable stdout")
        return p

    p = add("gen-synth", cmd_gen_synth, help="generate labeled synthetic sequences")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--classes", default="Neutral,Smile,Angry,Excited")
    p.add_argument("--sequences-per-class", type=int, default=8)
    p.add_argument("--frames", type=int, default=40)
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--color", action="store_true")
    p.add_argument("--noise", type=float, default=2.0)
    p.add_argument("--max-deform", type=int, default=8)
    p.add_argument("--train-split", type=int, default=None,
                   help="also write train.tsv/test.tsv with N train sequences per class")

    p = add("train-cascade", cmd_train_cascade, help="train a detection cascade")
    p.add_argument("--out", required=True)
    p.add_argument("--label", default="frontal")
    p.add_argument("--pos", help="directory of positive 24x24 PGM patches")
    p.add_argument("--neg", help="directory of negative patches")
    p.add_argument("--synth-seed", type=int, default=None,
                   help="generate schematic-face training patches instead")
    p.add_argument("--positives", type=int, default=120)
    p.add_argument("--negatives", type=int, default=240)
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--rounds", default="4,8,12")
    p.add_argument("--pool-stride", type=int, default=3)
    p.add_argument("--pool-cap", type=int, default=6000)

    p = add("detect", cmd_detect, help="detect faces in one image")
    p.add_argument("--cascade", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--scale-start", type=float, default=1.0)
    p.add_argument("--scale-factor", type=float, default=1.25)
    p.add_argument("--step", type=int, default=1)

    p = add("track", cmd_track, help="run a sequence and dump landmark CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--frames", required=True, help="sequence directory")
    p.add_argument("--csv", default=None, help="write CSV here instead of stdout")

    p = add("train", cmd_train, help="train an expression model from a manifest")
    p.add_argument("--config", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)

    p = add("evaluate", cmd_evaluate, help="evaluate a model on labeled sequences")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)

    p = add("benchmark", cmd_benchmark, help="measure per-frame throughput")
    p.add_argument("--config", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", default=None)

    p = add("import-cascade-xml", cmd_import_cascade_xml,
            help="convert an XML stump cascade to the native format")
    p.add_argument("--xml", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mirror", action="store_true")

    p = add("serve", cmd_serve, help="run the HTTP/JSON session service")
    p.add_argument("--config", required=True)
    p.add_argument("--port", type=int, default=8750)
    p.add_argument("--host", default="127.0.0.1")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("VISAGE_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (VisageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
