#include "recoding/engine/variants.hpp"

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::engine {
namespace {

const vocab::Vocabulary& require(const VariantContext& ctx, const std::string& name) {
  if (ctx.vocabularies == nullptr) {
    throw Error(ErrorCode::kConfigError, "variant needs vocabularies but none were loaded");
  }
  return ctx.vocabularies->get(name);
}

RdConfig base(Variant v, const VariantContext& ctx) {
  RdConfig cfg;
  cfg.variant = std::string(to_string(v));
  cfg.prompt = ctx.prompt;
  cfg.token_limit = ctx.token_limit;
  cfg.temperature = ctx.temperature;
  cfg.seed = ctx.seed;
  cfg.max_history_chars = ctx.max_history_chars;
  return cfg;
}

RdConfig ordinary(Variant v, const VariantContext& ctx) {
  auto cfg = base(v, ctx);
  cfg.single_shot = true;
  cfg.mode = ctx.od_mode;
  return cfg;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kOD: return "OD";
    case Variant::kODh: return "OD_h";
    case Variant::kODs: return "OD_s";
    case Variant::kODm: return "OD_m";
    case Variant::kOD16: return "OD_16";
    case Variant::kRD: return "RD";
    case Variant::kRDp: return "RD_p";
    case Variant::kRDd: return "RD_d";
  }
  return "";
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::kOD,   Variant::kODh, Variant::kODs,
                                      Variant::kODm,  Variant::kOD16, Variant::kRD,
                                      Variant::kRDp,  Variant::kRDd};
  return v;
}

Variant parse_variant(std::string_view name) {
  for (auto v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::kConfigError, "unknown method: " + std::string(name));
}

RdConfig variant_factory(Variant variant, const VariantContext& ctx) {
  switch (variant) {
    case Variant::kOD:
      return ordinary(variant, ctx);
    case Variant::kODh: {
      auto cfg = ordinary(variant, ctx);
      if (ctx.run_index > 0) {
        if (ctx.prior_outputs.size() != static_cast<std::size_t>(ctx.run_index)) {
          throw Error(ErrorCode::kConfigError,
                      "OD_h run " + std::to_string(ctx.run_index) + " needs " +
                          std::to_string(ctx.run_index) + " prior outputs, got " +
                          std::to_string(ctx.prior_outputs.size()));
        }
        for (std::size_t k = 0; k < ctx.prior_outputs.size(); ++k) {
          cfg.history.push_back({"user", k == 0 ? ctx.prompt : std::string(kMoreIdeasRequest)});
          cfg.history.push_back({"assistant", ctx.prior_outputs[k]});
        }
        cfg.prompt = std::string(kMoreIdeasRequest);
      }
      return cfg;
    }
    case Variant::kODs: {
      auto cfg = ordinary(variant, ctx);
      if (!cfg.prompt.empty() && !text::ends_with_space(cfg.prompt)) cfg.prompt += ' ';
      cfg.prompt += kThinkOutsideTheBox;
      return cfg;
    }
    case Variant::kODm: {
      auto cfg = ordinary(variant, ctx);
      const auto& phrases = require(ctx, ctx.phrase_vocab);
      const auto& phrase = phrases.entries[static_cast<std::size_t>(ctx.run_index) % phrases.size()];
      cfg.prompt = phrase + " " + ctx.prompt;
      return cfg;
    }
    case Variant::kOD16: {
      auto cfg = ordinary(variant, ctx);
      cfg.temperature = kHighTemperature;
      cfg.correction = true;
      return cfg;
    }
    case Variant::kRD:
    case Variant::kRDp:
    case Variant::kRDd: {
      auto cfg = base(variant, ctx);
      cfg.mode = ctx.rd_mode;
      cfg.correction = true;
      const auto* priming = variant == Variant::kRDd ? nullptr : &require(ctx, ctx.priming_vocab);
      const auto* diverting = variant == Variant::kRDp ? nullptr : &require(ctx, ctx.diverting_vocab);
      cfg.policy = recoding_policy(priming, diverting);
      return cfg;
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown variant");
}

}  // namespace recoding::engine
