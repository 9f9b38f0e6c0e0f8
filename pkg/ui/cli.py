# ui/cli.py
"""
持續同調近似器 - 命令列介面
ph 程式的子命令與參數解析

功能：
1. compute / subsample-mean：持續圖與子抽樣平均持續測度
2. frechet / quantize：集中趨勢估計
3. dist：wasserstein、bottleneck、ot、hausdorff 距離與憑證
4. experiment rate|variance|compare|bias-variance：收斂實驗
5. bounds：理論界限與速率區間
6. otmatrix：多資料集的成對 OT 距離矩陣

結束碼：0 成功；2 參數或設定錯誤；3 資料或解析錯誤。
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, TextIO

import numpy as np

from controller.analysis_controller import approximate_ph, export_ot_matrix, resolve_subsample_size
from controller.experiment_controller import bias_variance_check, compare_means, rate_experiment, variance_rate_check
from controller.input_controller import build_experiment_config, load_dataset, parse_dataset, reference_diagram
from controller.result_controller import ResultController
from core.bounds import (bias_bound, bias_bound_curve, frechet_bias_bound, hausdorff_tail_bound,
                         optimal_subsample_count, rate_regime)
from core.diagram_measure import diagram_to_measure
from core.means import centroids_around, frechet_mean, mean_measure, quantize
from core.rate_fit import fit_rate
from core.transport import bottleneck, ot_distance, p_hausdorff, wasserstein
from core.vr_persistence import vr_diagrams
from data.file_manager import FileManager
from data.input_data import ApproximationOptions, FrechetConfig, QuantizationConfig
from data.models import PersistenceDiagram, PersistenceMeasure, StandardAssumptionParams
from data.result_data import LossCurve, LossRow
from utils import config as app_config
from utils import initialize as initialize_utils
from utils.errors import ArgumentError, DataError, PHApproxError

logger = logging.getLogger("持續同調近似器.CLI")

PROG = "ph"


# ------ 參數解析輔助 ------


def int_list(text: str) -> List[int]:
    """ "100,150,200" 或含端點的 "100:500:50" """
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (int(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError("step 必須為正")
            return list(range(start, stop + 1, step))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"無法解析整數串列 {text!r}: {e}")


def point_list(text: str) -> np.ndarray:
    """ "b,d;b,d" → k×2 陣列"""
    try:
        return np.array([[float(v) for v in item.split(",")] for item in text.split(";") if item.strip()],
                        dtype=np.float64).reshape(-1, 2)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"無法解析質心 {text!r}: {e}")


def around_spec(text: str):
    """ "x,y,count,spread" """
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"--around 需要 x,y,count,spread，收到 {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2]), float(parts[3])
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"無法解析 --around {text!r}: {e}")


def frechet_init(text: str):
    if text in ("median", "random"):
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--init 需要 median、random 或整數索引，收到 {text!r}")


# ------ 共用設定 ------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=None, help="距離指數 p（預設取設定檔）")
    common.add_argument("--q", type=float, default=None, help="範數指標 q，可為 inf（預設 q = p）")
    common.add_argument("--dim", type=int, default=1, help="同調維度")
    common.add_argument("--seed", type=int, default=None, help="主種子")
    common.add_argument("--threads", type=int, default=None, help="平行工作數，不影響結果")
    common.add_argument("--min-persistence", type=float, default=None, help="持續度門檻 tau")
    common.add_argument("--max-scale", type=float, default=None, help="最大尺度，預設為包覆半徑")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="輸出格式")
    common.add_argument("-o", "--output", default=None, help="輸出檔案，預設為標準輸出")
    common.add_argument("--config", default=None, help="設定檔路徑")
    common.add_argument("--log-level", default=None, help="DEBUG、INFO、WARNING 或 ERROR")
    return common


def _p(args) -> float:
    return args.p if args.p is not None else float(app_config.get_config("transport.p", 2.0))


def _q(args) -> Optional[float]:
    return args.q if args.q is not None else app_config.get_config("transport.q")


def _seed(args) -> int:
    return args.seed if args.seed is not None else int(app_config.get_config("experiment.master_seed", 0))


def _threads(args) -> int:
    return args.threads if args.threads is not None else int(app_config.get_config("experiment.threads", 1))


def _min_persistence(args) -> float:
    if args.min_persistence is not None:
        return args.min_persistence
    return float(app_config.get_config("persistence.min_persistence", 0.0))


def _max_scale(args) -> Optional[float]:
    return args.max_scale if args.max_scale is not None else app_config.get_config("persistence.max_scale")


def _options(args, with_replacement: bool = False) -> ApproximationOptions:
    return ApproximationOptions(hom_dim=args.dim,
                                max_scale=_max_scale(args),
                                min_persistence=_min_persistence(args),
                                with_replacement=with_replacement,
                                n_jobs=_threads(args))


def _assumption(args, default_b: Optional[float] = None) -> StandardAssumptionParams:
    a = args.a if args.a is not None else app_config.get_config("bounds.a", 1.0)
    b = args.b if args.b is not None else app_config.get_config("bounds.b", default_b)
    r0 = args.r0 if args.r0 is not None else app_config.get_config("bounds.r0", 0.0)
    if b is None:
        raise ArgumentError("需要以 --b 指定標準假設的 b")
    try:
        return StandardAssumptionParams(float(a), float(b), float(r0))
    except ValueError as e:
        raise ArgumentError(str(e)) from e


def _add_assumption_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--a", type=float, default=None, help="標準假設的 a")
    parser.add_argument("--b", type=float, default=None, help="標準假設的 b，預設為流形內在維度")
    parser.add_argument("--r0", type=float, default=None, help="標準假設的 r0")


def _select_dim(diagrams: Sequence[PersistenceDiagram], dim: int, source: str) -> PersistenceDiagram:
    for D in diagrams:
        if D.homology_dim == dim:
            return D
    raise DataError(f"{source} 中沒有維度 {dim} 的持續圖")


def _load_measure_like(fm: FileManager, path: str, dim: int) -> PersistenceMeasure:
    """持續測度 JSON、單張持續圖或持續圖串列（取平均）"""
    data = fm.load_json(path)
    if isinstance(data, dict) and "atoms" in data:
        return fm.load_measure(path)
    diagrams = [D for D in fm.load_diagrams(path) if D.homology_dim == dim]
    if not diagrams:
        raise DataError(f"{path} 中沒有維度 {dim} 的持續圖")
    if len(diagrams) == 1:
        return diagram_to_measure(diagrams[0])
    return mean_measure(diagrams)


# ------ 子命令 ------


def cmd_compute(args, out: ResultController):
    data = load_dataset(parse_dataset(args.input), out.file_manager)
    truncate = args.truncate_essential or bool(app_config.get_config("persistence.truncate_essential", False))
    diagrams = vr_diagrams(data, args.dim, _max_scale(args), _min_persistence(args), truncate)
    out.write_diagrams(diagrams)


def cmd_subsample_mean(args, out: ResultController):
    data = load_dataset(parse_dataset(args.input), out.file_manager)
    n = resolve_subsample_size(data, args.n, args.fraction)
    opts = _options(args, args.with_replacement)
    result = approximate_ph(data, n, args.B, _seed(args), opts)
    if args.save_diagrams:
        out.save_diagrams(result.diagrams, args.save_diagrams)
    if args.plot:
        out.save_measure_plot(result.mean, args.plot)
    out.write_measure(result.mean)


def cmd_frechet(args, out: ResultController):
    diagrams = [D for D in out.file_manager.load_diagrams(args.input) if D.homology_dim == args.dim]
    if not diagrams:
        raise DataError(f"{args.input} 中沒有維度 {args.dim} 的持續圖")
    max_iter = args.max_iter or int(app_config.get_config("means.frechet_max_iter", 50))
    cfg = FrechetConfig(init=args.init, seed=_seed(args), max_iter=max_iter, n_jobs=_threads(args))
    result = frechet_mean(diagrams, cfg)
    if args.trace:
        out.save_trace(result.trace, args.trace)
    out.write_diagrams([result.diagram], {"frechet_value": result.value, "converged": result.converged})


def cmd_quantize(args, out: ResultController):
    mu = _load_measure_like(out.file_manager, args.input, args.dim)
    init = args.init
    if args.around:
        clusters = [centroids_around((x, y), count, spread, _seed(args) + i)
                    for i, (x, y, count, spread) in enumerate(args.around)]
        init = np.vstack(([init] if init is not None else []) + clusters)
    cfg = QuantizationConfig(k=args.k,
                             init=init,
                             max_iter=args.max_iter or int(app_config.get_config("means.quantize_max_iter", 100)),
                             rel_tol=args.rel_tol or float(app_config.get_config("means.quantize_rel_tol", 1e-6)),
                             p=_p(args),
                             q=_q(args))
    result = quantize(mu, cfg)
    if args.trace:
        out.save_trace(result.trace, args.trace)
    if args.plot:
        out.save_measure_plot(mu, args.plot, result.diagram)
    if args.diagram:
        out.write_diagrams([result.diagram], {"loss": result.loss})
    else:
        out.write_measure(result.measure)


def cmd_dist(args, out: ResultController):
    fm = out.file_manager
    p, q = _p(args), _q(args)
    if args.kind == "hausdorff":
        X, Y = fm.load_point_cloud(args.first), fm.load_point_cloud(args.second)
        value, certificate = p_hausdorff(X, Y, p)
        certificate = {"pairs": certificate, "cost": value**p}
    elif args.kind == "ot":
        mu, nu = _load_measure_like(fm, args.first, args.dim), _load_measure_like(fm, args.second, args.dim)
        value, certificate = ot_distance(mu, nu, p, q)
    else:
        D1 = _select_dim(fm.load_diagrams(args.first), args.dim, args.first)
        D2 = _select_dim(fm.load_diagrams(args.second), args.dim, args.second)
        if args.kind == "bottleneck":
            q = args.q if args.q is not None else float("inf")
            value, certificate = bottleneck(D1, D2, q)
        else:
            value, certificate = wasserstein(D1, D2, p, q)
    if args.plan:
        out.save_certificate(certificate, args.plan)
    out.write_value("distance", value, {"kind": args.kind, "p": p, "q": q if q is not None else p})


def _experiment_data(args, out: ResultController):
    spec = parse_dataset(args.input)
    data = load_dataset(spec, out.file_manager)
    return spec, data


def cmd_experiment_rate(args, out: ResultController):
    spec, data = _experiment_data(args, out)
    cfg = build_experiment_config(spec, args.n_grid,
                                  p=args.p, q=args.q, hom_dim=args.dim,
                                  b_rule=args.b_rule, b_coef=args.b_coef, b_values=args.b_values,
                                  repeats=args.repeats, master_seed=args.seed,
                                  with_replacement=args.with_replacement or None,
                                  min_persistence=args.min_persistence, max_scale=args.max_scale,
                                  loss_power=False if args.loss_root else None,
                                  reference_path=args.reference,
                                  a=args.a, b=args.b, r0=args.r0)
    reference = reference_diagram(data, cfg.hom_dim, cfg.max_scale, cfg.min_persistence, cfg.reference_path,
                                  out.file_manager)
    curve = rate_experiment(cfg, data, reference, args.csv, _threads(args), out.file_manager)

    fit = None
    needed = 4 if args.fit_exponent is None else 3
    if len(curve.rows) >= needed:
        fit = fit_rate(curve, args.fit_exponent)
    else:
        logger.warning(f"損失曲線只有 {len(curve.rows)} 列，略過擬合")

    if args.summary:
        out.file_manager.save_loss_curve(curve, args.summary)
    if args.plot:
        bound = None
        if cfg.assumption_b is not None and (cfg.p > cfg.assumption_b or curve.ns[0] > 1):
            params = StandardAssumptionParams(cfg.a, cfg.assumption_b, cfg.r0)
            bound = bias_bound_curve(params, cfg.p, curve.ns, len(data))
        out.save_curve_plot(curve, args.plot, fit, bound, "bias bound")
    out.write_curve(curve, fit)


def cmd_experiment_variance(args, out: ResultController):
    _, data = _experiment_data(args, out)
    report = variance_rate_check(data, args.n, args.b_grid, _seed(args), _p(args), _q(args),
                                 _options(args, args.with_replacement))
    curve, fit = report["curve"], report["fit"]
    if args.plot:
        by_B = LossCurve([LossRow(r.B, r.B, r.empirical_loss, 0.0) for r in curve.rows[:-1]], label="proxy")
        shape = [(r.B, 1.0 / np.sqrt(r.B)) for r in curve.rows[:-1]]
        out.save_curve_plot(by_B, args.plot, fit, shape, "C/sqrt(B)")
    out.write_curve(curve, fit)


def cmd_experiment_compare(args, out: ResultController):
    _, data = _experiment_data(args, out)
    opts = _options(args, args.with_replacement)
    reference = reference_diagram(data, args.dim, opts.max_scale, opts.min_persistence, args.reference,
                                  out.file_manager)
    rows = compare_means(data, args.n_grid, args.B, _seed(args), reference, args.sigma, opts,
                         FrechetConfig(n_jobs=opts.n_jobs))
    out.write_records([row.to_dict() for row in rows])


def cmd_experiment_bias_variance(args, out: ResultController):
    _, data = _experiment_data(args, out)
    opts = _options(args, args.with_replacement)
    reference = reference_diagram(data, args.dim, opts.max_scale, opts.min_persistence, args.reference,
                                  out.file_manager)
    report = bias_variance_check(data, args.n, args.B, args.proxy_B, _seed(args), reference, _p(args), _q(args),
                                 opts)
    out.write_records([report])


def cmd_bounds(args, out: ResultController):
    params = _assumption(args)
    p = _p(args)
    records = []
    for n in args.n_grid:
        regime = rate_regime(params, p, n)
        frechet = frechet_bias_bound(params, p, n, args.N, args.sigma2)
        record = {
            "n": n,
            "bias_bound": bias_bound(params, p, n, args.N),
            "frechet_bias_bound": frechet["value"],
            "frechet_offset": frechet["offset"],
            "optimal_B": optimal_subsample_count(n, p, params.b),
            "regime": regime["regime"],
            "bias_term": regime["bias_term"],
        }
        if args.r is not None:
            record["tail_bound"] = hausdorff_tail_bound(params, p, n, args.N, args.r)
        records.append(record)
    out.write_records(records)


def cmd_otmatrix(args, out: ResultController):
    datasets = [load_dataset(parse_dataset(text), out.file_manager) for text in args.inputs]
    matrix = export_ot_matrix(datasets, args.B, _seed(args), _options(args, args.with_replacement),
                              _p(args), _q(args), n=args.n, fraction=args.fraction)
    out.write_matrix(matrix)


# ------ 解析器 ------


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog=PROG, description="以子抽樣平均近似大型點雲的持續同調")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", parents=[common], help="計算 VR 持續圖（維度 0..--dim）")
    compute.add_argument("input", help="資料集描述或檔案")
    compute.add_argument("--truncate-essential", action="store_true", help="本質類截斷在最大尺度")
    compute.set_defaults(handler=cmd_compute)

    mean = sub.add_parser("subsample-mean", parents=[common], help="子抽樣平均持續測度")
    mean.add_argument("input", help="資料集描述或檔案")
    size = mean.add_mutually_exclusive_group(required=True)
    size.add_argument("--n", type=int, help="子樣本大小")
    size.add_argument("--fraction", type=float, help="子樣本占資料點數的比例")
    mean.add_argument("--B", type=int, required=True, help="子樣本數")
    mean.add_argument("--with-replacement", action="store_true")
    mean.add_argument("--save-diagrams", default=None, help="另存 B 張持續圖的 JSON")
    mean.add_argument("--plot", default=None, help="平均測度散佈圖 SVG")
    mean.set_defaults(handler=cmd_subsample_mean)

    frechet = sub.add_parser("frechet", parents=[common], help="持續圖的弗雷歇平均")
    frechet.add_argument("input", help="持續圖串列 JSON")
    frechet.add_argument("--init", type=frechet_init, default="median", help="median、random 或圖索引")
    frechet.add_argument("--max-iter", type=int, default=None)
    frechet.add_argument("--trace", default=None, help="迭代軌跡 JSON lines")
    frechet.set_defaults(handler=cmd_frechet)

    quant = sub.add_parser("quantize", parents=[common], help="持續測度量化")
    quant.add_argument("input", help="持續測度 JSON，或持續圖（串列則先取平均）")
    quant.add_argument("--k", type=int, default=1, help="質心數（給定 --init 或 --around 時忽略）")
    quant.add_argument("--init", type=point_list, default=None, help="初始質心 b,d;b,d")
    quant.add_argument("--around", type=around_spec, action="append", default=None,
                       help="在 x,y 附近產生 count 個抖動質心，可重複")
    quant.add_argument("--max-iter", type=int, default=None)
    quant.add_argument("--rel-tol", type=float, default=None)
    quant.add_argument("--diagram", action="store_true", help="輸出四捨五入重數的持續圖")
    quant.add_argument("--trace", default=None, help="迭代軌跡 JSON lines")
    quant.add_argument("--plot", default=None, help="測度與量化結果 SVG")
    quant.set_defaults(handler=cmd_quantize)

    dist = sub.add_parser("dist", parents=[common], help="兩個輸入之間的距離")
    dist.add_argument("kind", choices=["wasserstein", "bottleneck", "ot", "hausdorff"])
    dist.add_argument("first")
    dist.add_argument("second")
    dist.add_argument("--plan", default=None, help="憑證 JSON 輸出路徑")
    dist.set_defaults(handler=cmd_dist)

    experiment = sub.add_parser("experiment", help="收斂實驗")
    exp_sub = experiment.add_subparsers(dest="experiment", required=True)

    rate = exp_sub.add_parser("rate", parents=[common], help="損失隨 n 的收斂速率")
    rate.add_argument("input", help="資料集描述或檔案")
    rate.add_argument("--n-grid", type=int_list, required=True, help="100,150,200 或 100:500:50")
    rate.add_argument("--b-rule", choices=["explicit", "proportional", "power", "power_floor", "optimal"], default=None)
    rate.add_argument("--b-coef", type=float, default=None, help="proportional 的 c 或 power 的指數")
    rate.add_argument("--b-values", type=int_list, default=None, help="explicit 規則的 B 串列")
    rate.add_argument("--repeats", type=int, default=None)
    rate.add_argument("--with-replacement", action="store_true")
    rate.add_argument("--reference", default=None, help="參考持續圖 JSON")
    rate.add_argument("--csv", default=None, help="可續跑的逐格 CSV")
    rate.add_argument("--summary", default=None, help="損失曲線摘要 CSV")
    rate.add_argument("--plot", default=None, help="損失曲線 SVG")
    rate.add_argument("--fit-exponent", type=float, default=None, help="固定指數擬合；預設為自由指數")
    rate.add_argument("--loss-root", action="store_true", help="損失改用 OT_p 而非 OT_p^p")
    _add_assumption_flags(rate)
    rate.set_defaults(handler=cmd_experiment_rate)

    variance = exp_sub.add_parser("variance", parents=[common], help="固定 n，損失隨 B 的衰減")
    variance.add_argument("input", help="資料集描述或檔案")
    variance.add_argument("--n", type=int, required=True)
    variance.add_argument("--b-grid", type=int_list, required=True)
    variance.add_argument("--with-replacement", action="store_true")
    variance.add_argument("--plot", default=None)
    variance.set_defaults(handler=cmd_experiment_variance)

    compare = exp_sub.add_parser("compare", parents=[common], help="弗雷歇平均與平均持續測度的比較")
    compare.add_argument("input", help="資料集描述或檔案")
    compare.add_argument("--n-grid", type=int_list, required=True)
    compare.add_argument("--B", type=int, required=True)
    compare.add_argument("--sigma", type=float, default=0.0, help="高斯雜訊標準差")
    compare.add_argument("--reference", default=None)
    compare.add_argument("--with-replacement", action="store_true")
    compare.set_defaults(handler=cmd_experiment_compare)

    bv = exp_sub.add_parser("bias-variance", parents=[common], help="代理層級的偏差–變異檢查")
    bv.add_argument("input", help="資料集描述或檔案")
    bv.add_argument("--n", type=int, required=True)
    bv.add_argument("--B", type=int, required=True)
    bv.add_argument("--proxy-B", type=int, required=True)
    bv.add_argument("--reference", default=None)
    bv.add_argument("--with-replacement", action="store_true")
    bv.set_defaults(handler=cmd_experiment_bias_variance)

    bounds = sub.add_parser("bounds", parents=[common], help="理論界限")
    bounds.add_argument("--N", type=int, required=True, help="資料點數")
    bounds.add_argument("--n-grid", type=int_list, required=True)
    bounds.add_argument("--r", type=float, default=None, help="尾機率界限的半徑")
    bounds.add_argument("--sigma2", type=float, default=None, help="弗雷歇變異 σ²，未知時報告 +O(1)")
    _add_assumption_flags(bounds)
    bounds.set_defaults(handler=cmd_bounds)

    otm = sub.add_parser("otmatrix", parents=[common], help="成對 OT 距離矩陣")
    otm.add_argument("inputs", nargs="+", help="至少兩個資料集")
    size = otm.add_mutually_exclusive_group(required=True)
    size.add_argument("--n", type=int)
    size.add_argument("--fraction", type=float)
    otm.add_argument("--B", type=int, required=True)
    otm.add_argument("--with-replacement", action="store_true")
    otm.set_defaults(handler=cmd_otmatrix)

    return parser


def _setup(args):
    initialize_utils(config_path=args.config, log_level=args.log_level or "WARNING")


def main(argv: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None) -> int:
    """
    命令列進入點

    Args:
        argv: 參數串列，None 時取 sys.argv
        stream: 標準輸出替代

    Returns:
        int: 結束碼
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        _setup(args)
        out = ResultController(args.format, args.output, FileManager(), stream)
        args.handler(args, out)
        return 0
    except PHApproxError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"錯誤: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        logger.error(f"檔案不存在: {e}")
        print(f"錯誤: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        logger.error(f"參數錯誤: {e}")
        print(f"錯誤: {e}", file=sys.stderr)
        return 2
