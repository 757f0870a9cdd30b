#pragma once

#include <string>

#include "intentdisc/corpus.hpp"
#include "intentdisc/text.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(INTENTDISC_FIXTURES) + "/" + name; }
inline std::string read(const std::string& name) { return intentdisc::read_file(path(name)); }
inline std::string templates_dir() { return INTENTDISC_SOURCE_TEMPLATES; }

// The 15 IND labels of the 3:1 Banking77 setting, in fixed order.
inline std::vector<std::string> banking_ind() {
  return {"pin_blocked", "balance_not_updated_after_bank_transfer", "pending_card_payment", "verify_source_of_funds",
          "disposable_card_limits", "card_about_to_expire", "direct_debit_payment_not_recognised", "top_up_failed",
          "card_payment_fee_charged", "card_arrival", "card_payment_not_recognised", "activate_my_card",
          "transfer_timing", "getting_spare_card", "contactless_not_working"};
}

}  // namespace fixtures
