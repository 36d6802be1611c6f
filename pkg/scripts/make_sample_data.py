#!/usr/bin/env python3
"""Regenerate the bundled sample data deterministically.

Writes three files into src/logomt/data/:

  sample_table.tsv   test-scale character decomposition table
  sample_corpus.src  synthetic tokenized source corpus over the table
  sample_corpus.tgt  aligned synthetic target corpus

The table covers a bit over two hundred common CJK characters. Component
symbols are written in their base form (水 rather than 氵). Stroke strings
use the Unicode CJK stroke-type block and are derived per character by
concatenating the strokes of its components, which matches conventional
stroke order closely enough for test purposes. This is sample data for
tests and demos, not an exhaustive decomposition database.
"""

import random
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "logomt" / "data"

# Stroke-type alphabet (subset of the Unicode CJK Strokes block).
H = "㇐"    # ㇐ horizontal
S = "㇑"    # ㇑ vertical
P = "㇒"    # ㇒ left-falling
N = "㇏"    # ㇏ right-falling
D = "㇔"    # ㇔ dot
T = "㇀"    # ㇀ rising
HZ = "㇕"   # ㇕ horizontal turn
SZ = "㇗"   # ㇗ vertical turn
SG = "㇚"   # ㇚ vertical hook
HG = "㇆"   # ㇆ horizontal turn hook
HP = "㇇"   # ㇇ horizontal to falling
WG = "㇟"   # ㇟ vertical bend hook
SW = "㇄"   # ㇄ vertical bend
ZG = "㇉"   # ㇉ vertical double turn hook
HW = "㇈"   # ㇈ horizontal bend hook
XG = "㇂"   # ㇂ slant hook
WO = "㇃"   # ㇃ flat hook
ZP = "㇋"   # ㇋ double turn falling
WZ = "㇌"   # ㇌ turn curve hook
HK = "㇖"   # ㇖ horizontal hook
PD = "㇛"   # ㇛ falling with dot
PZ = "㇜"   # ㇜ falling turn

# Atomic components: symbol -> stroke string. Characters below decompose
# into these symbols only.
ATOMS = {
    "一": H, "二": H + H, "三": H + H + H, "十": H + S, "丁": H + SG,
    "七": H + WG, "人": P + N, "八": P + N, "入": P + N,
    "九": P + HW, "几": P + HW, "刀": HG + P, "力": HG + P,
    "又": HP + N, "乃": WZ + P, "匕": P + WG, "卜": S + D,
    "厶": PZ + D, "乞": P + H + WG, "千": P + H + S, "干": H + H + S,
    "于": H + H + SG, "寸": H + SG + D, "才": H + SG + P,
    "上": S + H + H, "下": H + S + D, "口": S + HZ + H, "囗": S + HZ + H,
    "山": S + SZ + S, "工": H + S + H, "土": H + S + H, "士": H + S + H,
    "夕": P + HG + D, "久": P + HP + N, "夂": P + HP + N,
    "广": D + H + P, "门": D + S + HG, "小": SG + P + D,
    "少": SG + P + D + P, "巾": S + HG + S, "中": S + HZ + H + S,
    "丰": H + H + H + S, "之": D + HP + N, "尸": HZ + H + P,
    "己": HZ + H + WG, "已": HZ + H + WG, "子": HP + SG + H,
    "女": PD + P + H, "马": HZ + ZG + H, "彐": HZ + H + H,
    "彡": P + P + P, "大": H + P + N, "天": H + H + P + N,
    "夫": H + H + P + N, "太": H + P + N + D, "犬": H + P + N + D,
    "木": H + S + P + N, "未": H + H + S + P + N, "末": H + H + S + P + N,
    "本": H + S + P + N + H, "禾": P + H + S + P + N,
    "失": P + H + H + P + N, "矢": P + H + H + P + N,
    "牛": P + H + H + S, "午": P + H + H + S,
    "王": H + H + S + H, "主": D + H + H + S + H, "五": H + S + HZ + H,
    "云": H + H + PZ + D, "元": H + H + P + WG, "今": P + N + D + SZ,
    "令": P + N + D + HP + D, "心": D + WO + D + D,
    "户": D + HZ + H + P, "方": D + H + HG + P, "文": D + H + P + N,
    "六": D + H + P + D, "火": D + P + P + N, "水": SG + HP + P + N,
    "手": P + H + H + SG, "月": P + HG + H + H,
    "日": S + HZ + H + H, "曰": S + HZ + H + H,
    "白": P + S + HZ + H + H, "自": P + S + HZ + H + H + H,
    "目": S + HZ + H + H + H, "且": S + HZ + H + H + H,
    "田": S + HZ + H + S + H, "甲": S + HZ + H + H + S,
    "石": H + P + S + HZ + H, "古": H + S + S + HZ + H,
    "可": H + S + HZ + H + SG, "司": HG + H + S + HZ + H,
    "占": S + D + S + HZ + H, "儿": P + WG,
    "先": P + H + S + H + P + WG, "生": P + H + H + S + H,
    "隹": P + S + D + H + H + H + H, "耳": H + S + S + H + H + H,
    "西": H + S + HZ + P + SW + H,
    "其": H + S + S + H + H + H + P + D,
    "昔": H + S + S + H + S + HZ + H + H,
    "羊": D + P + H + H + H + S, "每": P + H + HZ + D + H + D,
    "青": H + H + S + H + S + HZ + H + H,
    "圭": H + S + H + H + S + H, "贝": S + HZ + P + D,
    "见": S + HZ + P + WG, "车": H + SZ + H + S,
    "金": P + N + H + H + S + D + P + H,
    "言": D + H + H + H + S + HZ + H,
    "虫": S + HZ + H + S + H + D,
    "鱼": P + HP + S + HZ + H + S + H + H,
    "鸟": P + HG + D + ZG + H,
    "雨": H + S + HZ + S + D + D + D + D,
    "足": S + HZ + H + S + H + P + N,
    "走": H + S + H + S + H + P + N,
    "皮": HZ + P + S + HP + N, "皿": S + HZ + S + S + H,
    "米": D + P + H + S + P + N, "立": D + H + D + P + H,
    "巴": HZ + S + H + WG, "包": P + HG + HZ + H + WG,
    "勹": P + HG, "斗": D + D + H + S, "父": P + D + P + N,
    "戈": H + XG + P + D, "戋": H + H + XG + P + D,
    "我": P + H + S + T + XG + P + D,
    "乍": P + H + S + H + H, "尔": P + HP + S + D + D,
    "同": S + HG + H + S + HZ + H, "冈": S + HG + P + D,
    "风": P + HG + P + D,
    "免": P + HP + S + HZ + H + P + WG,
    "兆": P + D + T + WG + P + D,
    "它": D + D + HP + P + WG,
    "夹": H + D + P + H + P + N, "亡": D + H + SZ,
    "欠": P + HG + P + N, "舌": P + H + S + S + HZ + H,
    "交": D + H + P + D + P + N,
    "京": D + H + S + HZ + H + SG + P + D,
    "争": P + HP + HZ + H + SG,
    "对": HP + N + H + SG + D,
    "区": H + P + D + SZ, "弓": HZ + H + ZG,
    "也": HG + S + WG, "半": D + P + H + H + S,
    "台": PZ + D + S + HZ + H,
    "夆": P + HP + N + H + H + H + S,
    "宀": D + D + HK, "艹": H + S + S, "辶": D + ZP + N,
    "冖": D + HK, "冫": D + T, "灬": D + D + D + D,
    "勺": P + HG + D,
}

# Components that never occur as running text; they get no standalone entry.
INVENTORY_ONLY = {"囗", "厶", "彐", "彡", "宀", "艹", "辶", "冖", "冫", "灬", "勹", "夂", "夆", "戋", "隹"}

# Compound characters: char -> component symbols (flattened, in reading order).
COMPOUNDS = {
    # phonetic series around 也 / 区
    "驰": "马 也", "池": "水 也", "施": "方 也", "弛": "弓 也",
    "地": "土 也", "驱": "马 区", "他": "人 也", "她": "女 也",
    # 马 series
    "妈": "女 马", "吗": "口 马", "码": "石 马", "蚂": "虫 马",
    "骂": "口 口 马", "驴": "马 户", "骑": "马 大 可",
    # 木 series
    "林": "木 木", "森": "木 木 木", "树": "木 对", "村": "木 寸",
    "材": "木 才", "杉": "木 彡", "柏": "木 白", "枫": "木 风",
    "梅": "木 每", "杆": "木 干", "李": "木 子", "杏": "木 口",
    "束": "木 口", "呆": "口 木", "相": "木 目", "想": "木 目 心",
    "果": "田 木", "棵": "木 田 木", "课": "言 田 木", "梨": "禾 刀 木",
    "架": "力 口 木", "休": "人 木", "体": "人 木 一", "校": "木 交",
    "沐": "水 木", "淋": "水 木 木", "霜": "雨 木 目", "杜": "木 土",
    "柱": "木 主", "亲": "立 木", "桂": "木 圭", "棋": "木 其",
    "松": "木 八 厶",
    # 水 series
    "河": "水 可", "湖": "水 古 月", "海": "水 每", "洋": "水 羊",
    "江": "水 工", "汗": "水 干", "汁": "水 十", "沙": "水 少",
    "泊": "水 白", "法": "水 土 厶", "波": "水 皮", "清": "水 青",
    "洗": "水 先", "注": "水 主", "淡": "水 火 火", "婆": "水 皮 女",
    # 口 series
    "叶": "口 十", "叹": "口 又", "吃": "口 乞", "和": "禾 口",
    "鸣": "口 鸟", "唱": "口 日 曰", "味": "口 未", "吹": "口 欠",
    "告": "牛 口", "知": "矢 口", "吧": "口 巴", "问": "门 口",
    "员": "口 贝", "名": "夕 口", "另": "口 力", "只": "口 八",
    "哇": "口 圭", "哥": "可 可", "歌": "可 可 欠", "唯": "口 隹",
    # 土 series
    "坡": "土 皮", "坐": "人 人 土", "尘": "小 土", "里": "田 土",
    "圣": "又 土", "坛": "土 云", "吐": "口 土", "基": "其 土",
    "堆": "土 隹", "在": "土 才",
    # 圭 series
    "佳": "人 圭", "娃": "女 圭", "蛙": "虫 圭", "挂": "手 圭 卜",
    "封": "圭 寸",
    # 日 / 月 series
    "明": "日 月", "晴": "日 青", "时": "日 寸", "晒": "日 西",
    "旦": "日 一", "早": "日 十", "星": "日 生", "晚": "日 免",
    "暗": "日 立 日", "昌": "日 曰", "景": "日 京", "间": "门 日",
    "昨": "日 乍", "肝": "月 干", "肚": "月 土", "朋": "月 月",
    "胡": "古 月", "期": "其 月", "肥": "月 巴", "胖": "月 半",
    "胆": "月 日 一", "但": "人 日 一", "胜": "月 生",
    # 心 series
    "忘": "亡 心", "念": "今 心", "怕": "心 白", "愁": "禾 火 心",
    "思": "田 心", "息": "自 心", "情": "心 青", "性": "心 生",
    "惊": "心 京", "忙": "心 亡", "意": "立 日 心",
    # 手 series
    "打": "手 丁", "扛": "手 工", "把": "手 巴", "抱": "手 包",
    "拉": "手 立", "找": "手 戈", "扫": "手 彐", "拍": "手 白",
    "推": "手 隹", "持": "手 土 寸", "披": "手 皮", "投": "手 几 又",
    # 言 series
    "信": "人 言", "请": "言 青", "说": "言 八 口 儿", "话": "言 舌",
    "词": "言 司", "诗": "言 土 寸", "语": "言 五 口", "记": "言 己",
    "许": "言 午", "谈": "言 火 火", "谁": "言 隹",
    # 金 series
    "钟": "金 中", "铜": "金 同", "铁": "金 失", "钓": "金 勺",
    "铃": "金 令", "针": "金 十", "钱": "金 戋", "锋": "金 夆",
    # 虫 series
    "蚊": "虫 文", "虾": "虫 下", "蜂": "虫 夆", "蛇": "虫 它",
    # 鸟 series
    "鸡": "又 鸟", "鸭": "甲 鸟", "鹅": "我 鸟",
    # 雨 series
    "雪": "雨 彐", "雷": "雨 田", "零": "雨 令", "雾": "雨 夂 力",
    # 贝 series
    "财": "贝 才", "购": "贝 勹 厶", "货": "人 匕 贝", "贴": "贝 占",
    "贺": "力 口 贝",
    # 火 series
    "灯": "火 丁", "炉": "火 户", "炒": "火 少", "灿": "火 山",
    "烟": "火 囗 大", "炎": "火 火", "秋": "禾 火", "点": "占 灬",
    "炸": "火 乍",
    # 山 series
    "仙": "人 山", "峰": "山 夆", "峯": "山 夆", "岭": "山 令",
    "岗": "山 冈", "岩": "山 石", "峡": "山 夹", "出": "山 山",
    # 石 series
    "砂": "石 少", "砍": "石 欠", "破": "石 皮",
    # 田 series
    "男": "田 力", "苗": "艹 田", "略": "田 夂 口", "畧": "田 夂 口",
    # 禾 series
    "种": "禾 中", "秒": "禾 少", "科": "禾 斗", "秀": "禾 乃",
    "利": "禾 刀",
    # 米 series
    "粒": "米 立", "粉": "米 八 刀", "迷": "辶 米", "精": "米 青",
    "类": "米 大",
    # 足 series
    "路": "足 夂 口", "跑": "足 包", "跳": "足 兆",
    # 门 series
    "们": "人 门", "闻": "门 耳", "闪": "门 人",
    # 车 series
    "轨": "车 九", "军": "冖 车", "连": "辶 车", "轮": "车 人 匕",
    # misc series
    "的": "白 勺", "百": "一 白", "分": "八 刀", "盆": "八 刀 皿",
    "公": "八 厶", "动": "云 力", "运": "辶 云", "冷": "冫 令",
    "静": "青 争", "净": "冫 争", "站": "立 占", "战": "占 戈",
    "爸": "父 巴", "你": "人 尔", "作": "人 乍", "住": "人 主",
    "位": "人 立", "什": "人 十", "仁": "人 二", "多": "夕 夕",
    "音": "立 日", "姓": "女 生", "妹": "女 未", "姐": "女 且",
    "妙": "女 少", "好": "女 子", "如": "女 口", "始": "女 台",
    "姑": "女 古", "固": "囗 古", "苦": "艹 古", "估": "人 古",
    "因": "囗 大", "何": "人 可", "判": "半 刀", "选": "辶 先",
    "准": "冫 隹",
}

# Passthrough inventories for the corpus (absent from the table on purpose).
HIRAGANA = list("のはをにがでとへもやかなそれこです")
KATAKANA = list("システムデータモデルコーパストナ")
ASCII_WORDS = ["NMT", "BLEU", "BPE", "2018", "EN", "JP", "CN", "LSTM", "RNN", "10", "128"]


def build_entries():
    entries = {}
    for atom, strokes in ATOMS.items():
        if atom in INVENTORY_ONLY:
            continue
        entries[atom] = ([atom], list(strokes))
    for char, comp_field in COMPOUNDS.items():
        comps = comp_field.split()
        for c in comps:
            if c not in ATOMS:
                raise SystemExit(f"{char}: unknown component {c}")
        strokes = [s for c in comps for s in ATOMS[c]]
        if char in entries:
            raise SystemExit(f"duplicate entry {char}")
        entries[char] = (comps, strokes)
    return entries


def write_table(entries):
    lines = [
        "# Sample character decomposition table (test scale).",
        "# character <TAB> ideograph symbols <TAB> stroke symbols",
        "# Component symbols are written in base form (e.g. 水 covers 氵).",
    ]
    for char in sorted(entries, key=ord):
        comps, strokes = entries[char]
        lines.append(f"{char}\t{' '.join(comps)}\t{' '.join(strokes)}")
    out = DATA_DIR / "sample_table.tsv"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out


def make_word_list(chars, rng):
    """Plausible multi-character words plus all single characters."""
    fixed = [
        "森林", "树木", "土地", "大小", "上下", "山水", "火车", "汽车",
        "海水", "河水", "雨水", "星期", "明天", "早上", "晚上", "今天",
        "中心", "中文", "日文", "人口", "工人", "木材", "山峰", "山岭",
        "马路", "公路", "大门", "白天", "出口", "点心", "名字",
    ]
    words = [w for w in fixed if all(c in chars for c in w)]
    pool = sorted(chars)
    while len(words) < 90:
        a, b = rng.choice(pool), rng.choice(pool)
        w = a + b
        if w not in words:
            words.append(w)
    words.extend(pool)
    return words


TARGET_MAP_SIZE = 60


def make_corpus(entries, n_sentences=1000, seed=20180901):
    rng = random.Random(seed)
    chars = set(entries)
    words = make_word_list(chars, rng)
    kana_words = ["".join(rng.choice(HIRAGANA) for _ in range(rng.randint(1, 3))) for _ in range(25)]
    kana_words += ["".join(rng.choice(KATAKANA) for _ in range(rng.randint(2, 4))) for _ in range(15)]

    # Fixed word-level substitutions give the target side its own flavour
    # while the two sides stay drawn from the same character inventory.
    shuffled = words[:]
    rng.shuffle(shuffled)
    subst = dict(zip(words[:TARGET_MAP_SIZE], shuffled[:TARGET_MAP_SIZE]))
    particles = ["の", "は", "を", "に", "が", "で"]

    src_lines, tgt_lines = [], []
    for _ in range(n_sentences):
        n = rng.randint(4, 10)
        src = []
        for _ in range(n):
            r = rng.random()
            if r < 0.82:
                src.append(rng.choice(words))
            elif r < 0.94:
                src.append(rng.choice(kana_words))
            else:
                src.append(rng.choice(ASCII_WORDS))
        tgt = []
        for w in src:
            tgt.append(subst.get(w, w))
            if rng.random() < 0.25:
                tgt.append(rng.choice(particles))
        if rng.random() < 0.3:
            tgt.append("です")
        src_lines.append(" ".join(src))
        tgt_lines.append(" ".join(tgt))
    (DATA_DIR / "sample_corpus.src").write_text("\n".join(src_lines) + "\n", encoding="utf-8")
    (DATA_DIR / "sample_corpus.tgt").write_text("\n".join(tgt_lines) + "\n", encoding="utf-8")


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    entries = build_entries()
    write_table(entries)
    make_corpus(entries)
    n_atoms = len({c for comps, _ in entries.values() for c in comps})
    n_strokes = len({s for _, strokes in entries.values() for s in strokes})
    print(f"{len(entries)} entries, {n_atoms} ideograph symbols, {n_strokes} stroke symbols")


if __name__ == "__main__":
    main()
