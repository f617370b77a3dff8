"""
主程序入口

CTG Analyzer - 胎心监护（CTG）多智能体判读命令行工具

退出码：0 成功，1 分析错误，2 用法错误
"""

import argparse
import asyncio
import json
import platform
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.agents.orchestrator import BACKENDS, create_backend, run_pipeline
from src.analysis.pipeline import extract_evidence
from src.classify.models import AnalysisMode
from src.config.config_parser import AnalyzerConfig, ConfigParser
from src.evaluation.evaluator import Evaluator, RecordSampler
from src.exceptions import CtgAnalyzerError
from src.record.csv_io import LABELS_FILE, load_csv, load_labels, load_trace_directory, save_csv, save_labels
from src.render.raster import write_png
from src.render.svg_renderer import write_svg
from src.synth.generator import generate
from src.synth.sampler import ScenarioSampler
from src.synth.scenario import ScenarioLoader
from src.utils.logger import get_logger, setup_logger

EXIT_OK = 0
EXIT_ANALYSIS_ERROR = 1
EXIT_USAGE_ERROR = 2

MODES = tuple(mode.value for mode in AnalysisMode)


class UsageError(Exception):
    """命令行用法错误（退出码 2）"""
    pass


def _configure_console() -> None:
    """Windows 控制台切换为 UTF-8 输出"""
    if platform.system() != "Windows":
        return
    for stream in (sys.stdout, sys.stderr):
        try:
            stream.reconfigure(encoding="utf-8", errors="replace")
        except (AttributeError, ValueError):
            pass


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what}不存在: {p}")
    return p


def _emit(data: Dict[str, Any], out: Optional[str] = None) -> None:
    """JSON 结果写 stdout，指定 out 时同时写入文件"""
    text = json.dumps(data, ensure_ascii=False, indent=2)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    print(text)


def load_config(path: Optional[str]) -> AnalyzerConfig:
    """读取配置文件；未指定时使用默认配置"""
    if path is None:
        return AnalyzerConfig()
    try:
        return ConfigParser(str(_require_file(path, "配置文件"))).parse()
    except json.JSONDecodeError as e:
        raise UsageError(str(e)) from e


# ----------------------------------------------------------------------
# 子命令
# ----------------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace, config: AnalyzerConfig) -> int:
    csv_path = _require_file(args.csv, "轨迹文件")
    record = load_csv(csv_path, default_rate=config.preprocess.default_sample_rate_hz)
    mode = AnalysisMode(args.mode or config.agent.mode)
    backend = args.backend or config.agent.backend

    overall = asyncio.run(run_pipeline(record, mode, backend, config))
    _emit(overall.to_dict(), args.json)

    if args.svg or args.png:
        evidence = extract_evidence(record, config) if config.render.episode_markers else None
        if args.svg:
            write_svg(record, args.svg, config.render, evidence)
        if args.png:
            write_png(record, args.png, config.render, evidence)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: AnalyzerConfig) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise UsageError(f"轨迹目录不存在: {directory}")
    labels_path = Path(args.labels) if args.labels else directory / LABELS_FILE
    labels = load_labels(_require_file(str(labels_path), "标签文件"))

    eval_cfg = config.evaluation
    if args.jobs is not None:
        eval_cfg.jobs = args.jobs
    sampler = RecordSampler(
        sample=args.sample if args.sample is not None else eval_cfg.sample,
        balanced=args.balanced or eval_cfg.balanced,
        seed=args.seed if args.seed is not None else eval_cfg.seed,
    )
    trials = args.trials if args.trials is not None else eval_cfg.trials
    mode = AnalysisMode(args.mode or config.agent.mode)

    records = load_trace_directory(directory, labels, config.preprocess.default_sample_rate_hz)

    async def run():
        async with create_backend(args.backend or config.agent.backend, config) as backend:
            return await Evaluator(backend, config, mode).evaluate_async(
                records, labels, trials, sampler
            )

    report = asyncio.run(run())
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, config: AnalyzerConfig) -> int:
    logger = get_logger("synth")
    if args.scenario:
        scenarios = [ScenarioLoader().load(_require_file(args.scenario, "场景文件"))]
    else:
        sampler = ScenarioSampler()
        scenarios = [sampler.sample(args.seed + i, args.noise) for i in range(args.random)]

    out = Path(args.out)
    labels = {}
    written: List[str] = []
    for scenario in scenarios:
        record, truth = generate(scenario)
        written.append(str(save_csv(record, out / f"{record.record_id}.csv")))
        labels[record.record_id] = truth.binary
    save_labels(labels, out / LABELS_FILE)
    logger.info(f"✅ 已生成 {len(written)} 条合成记录: {out}")

    _emit({"out": str(out), "records": sorted(labels), "labels": str(out / LABELS_FILE)})
    return EXIT_OK


def cmd_render(args: argparse.Namespace, config: AnalyzerConfig) -> int:
    record = load_csv(_require_file(args.csv, "轨迹文件"),
                      default_rate=config.preprocess.default_sample_rate_hz)
    evidence = extract_evidence(record, config) if config.render.episode_markers else None
    out = Path(args.out)
    if out.suffix.lower() == ".png":
        write_png(record, out, config.render, evidence)
    else:
        write_svg(record, out, config.render, evidence)
    _emit({"record_id": record.record_id, "out": str(out)})
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "render": cmd_render,
}


# ----------------------------------------------------------------------
# 参数解析
# ----------------------------------------------------------------------

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"必须为正整数: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """构建命令行解析器

    Returns:
        argparse.ArgumentParser: 解析器
    """
    parser = argparse.ArgumentParser(
        prog="ctg-analyzer",
        description="CTG Analyzer - 胎心监护多智能体判读",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  # 规则引擎判读一条记录
  python -m src.main analyze data/t.csv --backend rules

  # 远程模型单次提示模式，同时输出走纸图
  python -m src.main analyze data/t.csv --backend remote --mode direct --svg out/t.svg

  # 50 条平衡抽样、5 次试验
  python -m src.main eval data/ --labels data/labels.csv --sample 50 --balanced --seed 7

  # 生成 20 条随机合成记录及 labels.csv
  python -m src.main synth --random 20 --seed 1 --out data/synth
        """
    )
    parser.add_argument("--config", type=str, default=None,
                        help="配置文件路径（默认使用内置默认配置）")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出 DEBUG 日志")

    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="判读一条记录，结果 JSON 输出到 stdout")
    analyze.add_argument("csv", help="轨迹 CSV 文件（t_s,fhr_bpm,uc）")
    analyze.add_argument("--mode", choices=MODES, default=None, help="multi 或 direct")
    analyze.add_argument("--backend", choices=BACKENDS, default=None, help="rules 或 remote")
    analyze.add_argument("--json", type=str, default=None, help="同时把结果写入该文件")
    analyze.add_argument("--svg", type=str, default=None, help="输出 SVG 走纸图")
    analyze.add_argument("--png", type=str, default=None, help="输出 PNG 走纸图")

    evaluate = sub.add_parser("eval", help="批量评估，输出 EvalReport JSON")
    evaluate.add_argument("dir", help="轨迹目录 <dir>/<record_id>.csv")
    evaluate.add_argument("--labels", type=str, default=None,
                          help="标签文件（默认 <dir>/labels.csv）")
    evaluate.add_argument("--trials", type=_positive_int, default=None, help="试验次数（默认 5）")
    evaluate.add_argument("--sample", type=_positive_int, default=None, help="每次试验抽样条数")
    evaluate.add_argument("--balanced", action="store_true", help="正常/异常各抽一半")
    evaluate.add_argument("--seed", type=int, default=None, help="抽样随机种子")
    evaluate.add_argument("--jobs", type=_positive_int, default=None, help="并发分析的记录数")
    evaluate.add_argument("--mode", choices=MODES, default=None)
    evaluate.add_argument("--backend", choices=BACKENDS, default=None)
    evaluate.add_argument("--out", type=str, default=None, help="同时把报告写入该文件")

    synth = sub.add_parser("synth", help="由场景生成合成记录")
    source = synth.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", type=str, help="场景 JSON 文件")
    source.add_argument("--random", type=_positive_int, help="随机抽取的场景数量")
    synth.add_argument("--seed", type=int, default=0, help="随机场景的起始种子")
    synth.add_argument("--noise", type=float, default=0.0, help="随机场景的噪声标准差（bpm）")
    synth.add_argument("--out", type=str, required=True, help="输出目录")

    render = sub.add_parser("render", help="绘制走纸图（按扩展名输出 SVG 或 PNG）")
    render.add_argument("csv", help="轨迹 CSV 文件")
    render.add_argument("--out", type=str, required=True, help="输出文件 .svg / .png")

    return parser


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """命令行入口

    Args:
        argv: 参数列表（默认取 sys.argv[1:]）

    Returns:
        int: 退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE_ERROR

    logger = get_logger()
    try:
        config = load_config(args.config)
        logger = setup_logger(config, verbose=args.verbose)
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except (CtgAnalyzerError, FileNotFoundError) as e:
        logger.debug("分析失败", exc_info=True)
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ANALYSIS_ERROR


def main() -> None:
    _configure_console()
    try:
        sys.exit(cli())
    except KeyboardInterrupt:
        print("\n用户中断，程序退出", file=sys.stderr)
        sys.exit(EXIT_ANALYSIS_ERROR)


if __name__ == "__main__":
    main()
